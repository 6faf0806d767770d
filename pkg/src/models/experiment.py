import math
from typing import Any, Dict, List, Literal, Optional, get_args

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core.configs import settings
from src.core.errors import ConfigError

ExperimentKind = Literal[
    "fidelity-curve",
    "fidelity-vs-k",
    "echo-matrix",
    "peak-track",
    "sk-cumulative",
    "coherent-overlap",
    "identity-check",
    "interference-demo",
]

EXPERIMENT_KINDS: List[str] = list(get_args(ExperimentKind))

READS_K_SET = (
    "fidelity-curve",
    "fidelity-vs-k",
    "echo-matrix",
    "peak-track",
    "identity-check",
    "interference-demo",
)
ACCEPTS_THETA = ("fidelity-curve", "interference-demo")
READS_L = ("echo-matrix", "peak-track", "sk-cumulative")


class KeyedValueError(ValueError):
    """A cross-field check that fails on one particular key."""

    def __init__(self, key: str, message: str):
        super().__init__(message)
        self.key = key


def parse_number_list(value: Any) -> List[float]:
    """
    Parse "a,b,c" or an inclusive integer range "a:b" into a list of numbers.

    Lists and tuples pass through; a bare number becomes a one-element list.
    """
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, (int, float)):
        return [float(value)]
    text = str(value).strip()
    if not text:
        return []
    if ":" in text and "," not in text:
        start, stop = (int(part) for part in text.split(":"))
        if stop < start:
            raise ValueError(f"range {text!r} is empty")
        return [float(v) for v in range(start, stop + 1)]
    return [float(part) for part in text.split(",") if part.strip()]


class ExperimentConfig(BaseModel):
    """Fully resolved settings of one echo-lab run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ExperimentKind
    recipe: Optional[str] = None

    # Model
    n_atoms: int = Field(default=200, ge=1)
    mu: float = 1.0
    g_c: float = 0.2
    K: float = 1.0
    T: float = Field(default=1.0, gt=0.0)
    sigma: float = Field(default=0.1, ge=0.0)

    # K scan
    K_min: float = 0.0
    K_max: float = 4.0
    K_step: float = Field(default=0.01, gt=0.0)

    # Indices and times
    k_set: List[float] = Field(default_factory=lambda: [-100.0, -75.0, 0.0, 75.0, 100.0])
    l: float = -100.0
    l_set: List[float] = Field(default_factory=lambda: [100.0, -100.0, 0.0])
    times: List[int] = Field(default_factory=lambda: [100, 500, 1450])
    n_max: int = Field(default=2000, ge=0)
    t_fixed: int = Field(default=1000, ge=0)

    # Initial-state variants of fidelity-curve
    theta: Optional[float] = Field(default=None, ge=0.0, le=math.pi)
    phi: float = Field(default=0.0, ge=0.0, lt=2.0 * math.pi)
    leak: float = Field(default=0.0, ge=0.0, le=1.0)

    # Peaks
    threshold_frac: float = Field(default_factory=lambda: settings.peak_threshold_frac, gt=0.0, lt=1.0)
    min_gap: int = Field(default_factory=lambda: settings.peak_min_gap, ge=0)

    # Coherent overlaps
    n_theta: int = Field(default=181, ge=2)

    # Identity check
    n_observables: int = Field(default=1, ge=1)

    # Interference
    delta_K: float = 0.001
    n_free: int = Field(default=0, ge=0)
    noise: float = Field(default=0.0, ge=0.0)
    noise_mode: Literal["gaussian", "multinomial"] = "gaussian"
    noise_atoms: int = Field(default=100_000, gt=0)
    width: float = Field(default=1.0, gt=0.0)
    separation: Optional[float] = Field(default=None, gt=0.0)
    q: Optional[float] = None
    n_x: int = Field(default_factory=lambda: settings.grid_points, ge=16)

    # Run
    seed: int = 0
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)
    out: Optional[str] = None

    @field_validator("k_set", "l_set", mode="before")
    @classmethod
    def _index_list(cls, value: Any) -> List[float]:
        return parse_number_list(value)

    @field_validator("times", mode="before")
    @classmethod
    def _time_list(cls, value: Any) -> List[int]:
        times = parse_number_list(value)
        if any(t != int(t) or t < 0 for t in times):
            raise ValueError("times must be non-negative integers")
        return [int(t) for t in times]

    @field_validator("mu", "g_c", "K", "K_min", "K_max", "delta_K")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @model_validator(mode="after")
    def _check_kind(self) -> "ExperimentConfig":
        if self.kind == "fidelity-vs-k" and self.K_max < self.K_min:
            raise KeyedValueError("K_max", "K_max must not be smaller than K_min")
        uses_theta = self.theta is not None and self.kind in ACCEPTS_THETA
        if self.kind in READS_K_SET and not self.k_set and not uses_theta:
            raise KeyedValueError("k_set", f"{self.kind} needs at least one Fock index in k_set")
        if uses_theta and self.leak > 0.0:
            raise KeyedValueError("leak", "leak applies to Fock initial states; unset theta or leak")
        if self.kind == "sk-cumulative" and not self.times:
            raise KeyedValueError("times", "times must name at least one kick count")
        if self.kind == "coherent-overlap" and not self.l_set:
            raise KeyedValueError("l_set", "l_set must name at least one Fock index")
        return self

    @property
    def K_grid(self) -> np.ndarray:
        """K_min..K_max inclusive in steps of K_step."""
        count = int(math.floor((self.K_max - self.K_min) / self.K_step + 1e-9)) + 1
        return self.K_min + self.K_step * np.arange(count)

    def provenance(self) -> Dict[str, Any]:
        """Resolved key/value pairs for the CSV header, without run-only fields."""
        return self.model_dump(exclude={"workers", "out"})


def build_config(values: Dict[str, Any]) -> ExperimentConfig:
    """
    Validate raw key/value pairs into an ExperimentConfig.

    Raises:
        ConfigError: naming the first offending key
    """
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        error = e.errors()[0]
        cause = error.get("ctx", {}).get("error")
        key = getattr(cause, "key", None) or ".".join(str(part) for part in error["loc"]) or "config"
        raise ConfigError(f"invalid value for {key!r}: {error['msg']}", key=key) from e
