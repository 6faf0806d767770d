import difflib
from dataclasses import dataclass, field
from typing import Dict, List

from src.core.errors import ConfigError
from src.models.experiment import EXPERIMENT_KINDS

DECAY_PARAMS = {"n_atoms": 200, "K": 1.0, "g_c": 0.2, "sigma": 0.1}
REGULAR_PARAMS = {"n_atoms": 200, "K": 2.0, "g_c": 0.17, "sigma": 0.5}


@dataclass(frozen=True)
class Recipe:
    name: str
    kind: str
    description: str
    bindings: Dict[str, object] = field(default_factory=dict)


RECIPES: Dict[str, Recipe] = {
    recipe.name: recipe
    for recipe in [
        Recipe(
            "fig1",
            "fidelity-curve",
            "Fidelity decay of |-L>, |-L/2>, |0>, |L/2>, |L>",
            {**DECAY_PARAMS, "k_set": "-100,-75,0,75,100", "n_max": 2000},
        ),
        Recipe(
            "fig2",
            "fidelity-curve",
            "Fidelity decay of the Fock states next to |L>",
            {**DECAY_PARAMS, "k_set": "100,99,98,97", "n_max": 2000},
        ),
        Recipe(
            "fig3a",
            "fidelity-vs-k",
            "M(1000) against K for weak perturbation",
            {
                "n_atoms": 200,
                "g_c": 0.2,
                "sigma": 0.01,
                "t_fixed": 1000,
                "K_min": 0.0,
                "K_max": 4.0,
                "K_step": 0.01,
                "k_set": "-100,-50,0,50,100",
            },
        ),
        Recipe(
            "fig3b",
            "fidelity-vs-k",
            "M(1000) against K for stronger perturbation",
            {
                "n_atoms": 200,
                "g_c": 0.2,
                "sigma": 0.04,
                "t_fixed": 1000,
                "K_min": 0.0,
                "K_max": 4.0,
                "K_step": 0.01,
                "k_set": "-100,-50,0,50,100",
            },
        ),
        Recipe(
            "fig4",
            "coherent-overlap",
            "|<alpha|l>|^2 against theta for edge and central Fock states",
            {"n_atoms": 200, "l_set": "100,99,98,-100,-99,-98,0,2", "n_theta": 181},
        ),
        Recipe(
            "fig5",
            "echo-matrix",
            "M_lk(n) at l=-31 over k=-100..100 in the regular regime",
            {**REGULAR_PARAMS, "l": -31, "k_set": "-100:100", "n_max": 2000},
        ),
        Recipe(
            "fig6",
            "echo-matrix",
            "M_lk(n) at l=-100 over k=-100..100 in the regular regime",
            {**REGULAR_PARAMS, "l": -100, "k_set": "-100:100", "n_max": 2000},
        ),
        Recipe(
            "fig7",
            "sk-cumulative",
            "Cumulative S_k at l=-100 for fixed times",
            {**REGULAR_PARAMS, "l": -100, "times": "100,500,1000,1450"},
        ),
        Recipe(
            "peaktrack",
            "peak-track",
            "First and second peak centers of M_lk(n) at l=-100",
            {**REGULAR_PARAMS, "l": -100, "k_set": "-100:100", "n_max": 2000},
        ),
        Recipe(
            "identity",
            "identity-check",
            "Observable-difference identity for random Hermitian observables",
            {
                "n_atoms": 16,
                "K": 1.0,
                "g_c": 0.2,
                "sigma": 0.3,
                "k_set": "0",
                "times": "0,10,50",
                "n_observables": 10,
            },
        ),
        Recipe(
            "interference",
            "interference-demo",
            "Double-well fringe readout of the fidelity amplitude of |L>",
            {
                "n_atoms": 200,
                "K": 1.0,
                "g_c": 0.2,
                "delta_K": 0.001,
                "k_set": "100",
                "n_max": 200,
                "noise": 0.01,
            },
        ),
    ]
}


def get_recipe(name: str) -> Recipe:
    """
    Look up a named recipe.

    Raises:
        ConfigError: for an unknown name, with the closest match when there is one
    """
    try:
        return RECIPES[name]
    except KeyError:
        candidates = list(RECIPES) + EXPERIMENT_KINDS
        close = difflib.get_close_matches(name, candidates, n=1)
        hint = f"; did you mean {close[0]!r}?" if close else ""
        raise ConfigError(f"unknown experiment or recipe {name!r}{hint}", key="recipe") from None


def list_recipes() -> str:
    lines: List[str] = []
    for recipe in RECIPES.values():
        bindings = ", ".join(f"{key}={value}" for key, value in recipe.bindings.items())
        lines.append(f"{recipe.name:<13}{recipe.kind:<18}{recipe.description}")
        lines.append(f"{'':<13}{bindings}")
    return "\n".join(lines)
