import cmath
from functools import partial
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from src.core.errors import ConfigError, DomainError
from src.domain.coherent import coherent_state, overlap_profile
from src.domain.fidelity import (
    EchoCurve,
    cumulative_sk,
    echo_matrix,
    echo_matrix_at_times,
    fidelity_at_time_vs_K,
    fidelity_curve,
    fidelity_curve_state,
    first_drop_below,
    generalized_fidelity_curve,
    imperfect_fock_coefficients,
    observable_difference_check,
)
from src.domain.interference import (
    NoiseModel,
    counter_propagating_packets,
    extract_fidelity,
    synthesize_pattern,
    two_well_fidelity,
)
from src.domain.peaks import track_peak_centers
from src.domain.spinspace import SpinBasis, StateVector, fock_state, make_basis, random_hermitian
from src.models.experiment import ACCEPTS_THETA, READS_K_SET, READS_L, ExperimentConfig
from src.models.params import ModelParams, SphereAngle
from src.services.output import write_csv
from src.services.sweeps import run_sharded
from src.utils.logging import get_logger

logger = get_logger(__name__)

Summary = Optional[Dict[str, Any]]


def _params(config: ExperimentConfig) -> ModelParams:
    return ModelParams(mu=config.mu, g_c=config.g_c, K=config.K, T=config.T, sigma=config.sigma)


def _label(value: float) -> Any:
    """Integral Fock indices print as integers, half-integers as floats."""
    return int(value) if float(value).is_integer() else float(value)


def _warn_extra_indices(config: ExperimentConfig, k: float) -> None:
    if len(config.k_set) > 1:
        logger.warning(
            f"{config.kind} uses one initial state; running k={_label(k)} and ignoring the other "
            f"{len(config.k_set) - 1} entries of k_set"
        )


def _check_indices(config: ExperimentConfig, basis: SpinBasis) -> None:
    """Resolve every Fock index the run will read, naming the key that holds a bad one."""
    keys = []
    if config.kind in READS_K_SET and not (config.theta is not None and config.kind in ACCEPTS_THETA):
        keys.append(("k_set", config.k_set))
    if config.kind in READS_L:
        keys.append(("l", [config.l]))
    if config.kind == "coherent-overlap":
        keys.append(("l_set", config.l_set))
    for key, indices in keys:
        for index in indices:
            try:
                basis.row_of(index)
            except DomainError as e:
                raise ConfigError(f"invalid value for {key!r}: {e}", key=key) from e


def _initial_state(config: ExperimentConfig, basis: SpinBasis) -> Tuple[StateVector, str]:
    if config.theta is not None:
        angle = SphereAngle(theta=config.theta, phi=config.phi)
        return coherent_state(basis, angle), f"coherent({config.theta:g},{config.phi:g})"
    k = config.k_set[0]
    _warn_extra_indices(config, k)
    return fock_state(basis, k), str(_label(k))


def _curve_task(config: ExperimentConfig, k: float) -> EchoCurve:
    basis = make_basis(config.n_atoms)
    params = _params(config)
    if config.leak > 0.0:
        prepared = imperfect_fock_coefficients(basis, k, config.leak)
        return generalized_fidelity_curve(basis, params, prepared, k, config.n_max)
    return fidelity_curve(basis, params, k, config.n_max)


def _echo_task(config: ExperimentConfig, k: float) -> np.ndarray:
    basis = make_basis(config.n_atoms)
    return echo_matrix(basis, _params(config), config.l, [k], config.n_max).values[:, 0]


def _scan_task(config: ExperimentConfig, K: float) -> np.ndarray:
    basis = make_basis(config.n_atoms)
    table = fidelity_at_time_vs_K(
        basis, config.g_c, config.sigma, config.t_fixed, [K], config.k_set, config.mu, config.T
    )
    return table[0]


def _sk_task(config: ExperimentConfig, t: int) -> np.ndarray:
    basis = make_basis(config.n_atoms)
    matrix = echo_matrix_at_times(basis, _params(config), config.l, [t])
    return cumulative_sk(matrix, t)


def run_fidelity_curve(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    if config.theta is not None:
        basis = make_basis(config.n_atoms)
        initial, label = _initial_state(config, basis)
        curves = {label: fidelity_curve_state(basis, _params(config), initial, config.n_max, label)}
    else:
        results = run_sharded(partial(_curve_task, config), config.k_set, config.workers)
        curves = {_label(k): curve for k, curve in zip(config.k_set, results)}

    frame = pd.concat(
        [pd.DataFrame({"n": curve.n, "k": k, "M": curve.M}) for k, curve in curves.items()],
        ignore_index=True,
    )
    summary = {f"first_drop_{k}": first_drop_below(curve) for k, curve in curves.items()}
    return frame, summary


def run_fidelity_vs_K(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    K_grid = config.K_grid
    rows = run_sharded(partial(_scan_task, config), K_grid.tolist(), config.workers)
    column = f"M{config.t_fixed}"
    records = [
        {"K": float(K), "k": _label(k), column: float(M)}
        for K, row in zip(K_grid, rows)
        for k, M in zip(config.k_set, row)
    ]
    return pd.DataFrame.from_records(records, columns=["K", "k", column]), None


def _echo_curves(config: ExperimentConfig) -> Dict[float, np.ndarray]:
    results = run_sharded(partial(_echo_task, config), config.k_set, config.workers)
    return dict(zip(config.k_set, results))


def run_echo_matrix(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    n = np.arange(config.n_max + 1)
    frames = [
        pd.DataFrame({"n": n, "k": _label(k), "l": _label(config.l), "Mlk": M})
        for k, M in _echo_curves(config).items()
    ]
    return pd.concat(frames, ignore_index=True), None


def run_peak_track(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    curves = _echo_curves(config)
    tracks, merge_k = track_peak_centers(
        curves, config.threshold_frac, config.min_gap, np.arange(config.n_max + 1)
    )
    records = []
    for k, track in zip(curves, tracks):
        peaks = [p for p in (track.first, track.second) if p is not None]
        for index, peak in enumerate(peaks):
            records.append(
                {
                    "k": _label(k),
                    "peak_index": index,
                    "center_n": peak.center_n,
                    "height": peak.height,
                    "n_peaks": track.n_peaks,
                }
            )
    columns = ["k", "peak_index", "center_n", "height", "n_peaks"]
    merge = None if merge_k is None else _label(merge_k)
    return pd.DataFrame.from_records(records, columns=columns), {"merge_k": merge}


def run_sk_cumulative(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    basis = make_basis(config.n_atoms)
    results = run_sharded(partial(_sk_task, config), config.times, config.workers)
    frames = [
        pd.DataFrame({"k": basis.labels, "t": t, "S": S}) for t, S in zip(config.times, results)
    ]
    return pd.concat(frames, ignore_index=True), None


def run_coherent_overlap(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    basis = make_basis(config.n_atoms)
    thetas = np.linspace(0.0, np.pi, config.n_theta)
    frames = [
        pd.DataFrame({"theta": thetas, "l": _label(l), "overlap": overlap_profile(basis, thetas, l)})
        for l in config.l_set
    ]
    return pd.concat(frames, ignore_index=True), None


def run_identity_check(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    basis = make_basis(config.n_atoms)
    params = _params(config)
    k = config.k_set[0]
    _warn_extra_indices(config, k)
    records = []
    for i in range(config.n_observables):
        A = random_hermitian(basis, config.seed + i)
        for n in config.times:
            check = observable_difference_check(basis, params, A, k, n)
            records.append(
                {"n": n, "lhs": check.lhs, "rhs": check.rhs, "absdiff": check.absdiff, "seed": config.seed + i}
            )
    frame = pd.DataFrame.from_records(records, columns=["n", "lhs", "rhs", "absdiff", "seed"])
    return frame, {"max_absdiff": float(frame["absdiff"].max())}


def run_interference_demo(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    basis = make_basis(config.n_atoms)
    initial, label = _initial_state(config, basis)
    f_true = two_well_fidelity(
        basis, _params(config), config.delta_K, initial, config.n_max, config.n_free
    )
    chi1, chi2 = counter_propagating_packets(config.width, config.separation, config.q, config.n_x)
    noise = None
    if config.noise > 0.0:
        noise = NoiseModel(
            mode=config.noise_mode,
            relative=config.noise,
            n_atoms=config.noise_atoms,
            seed=config.seed,
        )
    pattern = synthesize_pattern(chi1, chi2, f_true, noise)
    estimate = extract_fidelity(pattern, chi1, chi2)
    logger.info(
        f"Initial {label}: |f| = {abs(f_true):.6f} true, {estimate.magnitude:.6f} recovered"
    )
    summary = {
        "f_mag_true": abs(f_true),
        "f_mag_est": estimate.magnitude,
        "f_phase_true": cmath.phase(f_true),
        "f_phase_est": estimate.phase,
    }
    return pd.DataFrame({"x": pattern.x, "P": pattern.intensities}), summary


RUNNERS: Dict[str, Callable[[ExperimentConfig], Tuple[pd.DataFrame, Summary]]] = {
    "fidelity-curve": run_fidelity_curve,
    "fidelity-vs-k": run_fidelity_vs_K,
    "echo-matrix": run_echo_matrix,
    "peak-track": run_peak_track,
    "sk-cumulative": run_sk_cumulative,
    "coherent-overlap": run_coherent_overlap,
    "identity-check": run_identity_check,
    "interference-demo": run_interference_demo,
}


def run_experiment(config: ExperimentConfig) -> Tuple[pd.DataFrame, Summary]:
    """Compute the dataset of one experiment without writing it."""
    logger.info(f"Running {config.recipe or config.kind} (N={config.n_atoms}, workers={config.workers})")
    _check_indices(config, make_basis(config.n_atoms))
    return RUNNERS[config.kind](config)


def run(config: ExperimentConfig) -> str:
    """
    Run one experiment and write its CSV.

    Returns:
        str: the output path, "-" for stdout
    """
    frame, summary = run_experiment(config)
    return write_csv(frame, config, summary)
