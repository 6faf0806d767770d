"""
Double-well readout of a fidelity amplitude.

The two condensate clouds evolve under couplings K and K + delta_K. After the
fields are switched off and the clouds overlap, the density is

    P(x) = |chi1|^2 + |chi2|^2 + 2 Re[f chi1 chi2^*],

so the fringe term carries the fidelity amplitude f. Packets are specified
directly in their post-expansion form; free expansion is not simulated.
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.configs import settings
from src.core.errors import DomainError, NumericalError, UnrecoverableGeometryError
from src.domain.floquet import build_floquet, evolve, free_propagator
from src.domain.spinspace import SpinBasis, StateVector, inner
from src.models.params import ModelParams
from src.models.results import ExtractionResult
from src.utils.logging import get_logger

logger = get_logger(__name__)

MAX_NOISE_DRAWS = 100


class NoiseModel(BaseModel):
    """Shot noise on the measured density, either multiplicative Gaussian or binned counts."""

    model_config = ConfigDict(frozen=True)

    mode: Literal["gaussian", "multinomial"] = "gaussian"
    relative: float = Field(default=0.01, ge=0.0)
    n_atoms: int = Field(default=100_000, gt=0)
    seed: int = 0


@dataclass(frozen=True, eq=False)
class WavePacket:
    x: np.ndarray
    center: float
    width: float
    q: float
    amplitude: float = 1.0

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if self.width <= 0.0 or self.amplitude <= 0.0:
            raise DomainError("packet width and amplitude must be positive")
        if x.ndim != 1 or x.size < 3:
            raise DomainError("packet grid must be a 1-D array of at least 3 points")
        steps = np.diff(x)
        if np.any(steps <= 0.0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise DomainError("packet grid must be uniform and increasing")
        if x[0] > self.center - 6.0 * self.width or x[-1] < self.center + 6.0 * self.width:
            raise DomainError(
                f"grid [{x[0]:g}, {x[-1]:g}] must extend 6 widths beyond the center {self.center:g}"
            )
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def values(self) -> np.ndarray:
        """chi(x) = A exp(-(x - c)^2 / (4 w^2)) exp(i q x)"""
        envelope = self.amplitude * np.exp(-((self.x - self.center) ** 2) / (4.0 * self.width**2))
        return envelope * np.exp(1j * self.q * self.x)


@dataclass(frozen=True, eq=False)
class InterferencePattern:
    x: np.ndarray
    intensities: np.ndarray
    noise: Optional[NoiseModel] = None


def make_grid(
    midpoint: float,
    width: float,
    n_points: Optional[int] = None,
    half_span: Optional[float] = None,
) -> np.ndarray:
    n_points = n_points or settings.grid_points
    half_span = half_span or settings.grid_half_span
    return np.linspace(midpoint - half_span * width, midpoint + half_span * width, n_points)


def counter_propagating_packets(
    width: float = 1.0,
    separation: Optional[float] = None,
    q: Optional[float] = None,
    n_points: Optional[int] = None,
) -> Tuple[WavePacket, WavePacket]:
    """
    Two packets centered around 0 with wavevectors +q and -q.

    The default q = 4 pi / width puts about 16 fringes inside the overlap
    envelope.
    """
    separation = width if separation is None else separation
    q = 4.0 * math.pi / width if q is None else q
    x = make_grid(0.0, width, n_points)
    return (
        WavePacket(x, -0.5 * separation, width, q),
        WavePacket(x, 0.5 * separation, width, -q),
    )


def two_well_fidelity(
    basis: SpinBasis,
    params: ModelParams,
    delta_K: float,
    initial: StateVector,
    n: int,
    n_free: int = 0,
) -> complex:
    """
    f = <U2^n phi | U1^n phi> for wells kicked with K and K + delta_K.

    n_free further periods run with the coupling switched off in both wells;
    they leave f unchanged.
    """
    if n < 0 or n_free < 0:
        raise DomainError(f"kick counts must be >= 0, got n={n}, n_free={n_free}")
    well_params = params.with_sigma(0.0)
    U1 = build_floquet(basis, well_params)
    U2 = build_floquet(basis, well_params.with_coupling(params.K + delta_K))
    psi1 = evolve(U1, initial, n)
    psi2 = evolve(U2, initial, n)
    if n_free:
        free = free_propagator(basis, well_params)
        psi1 = evolve(free, psi1, n_free)
        psi2 = evolve(free, psi2, n_free)
    return inner(psi2, psi1)


def _check_grids(chi1: WavePacket, chi2: WavePacket, x: Optional[np.ndarray] = None) -> None:
    if not np.array_equal(chi1.x, chi2.x) or (x is not None and not np.array_equal(chi1.x, x)):
        raise DomainError("wave packets and pattern must share one grid")


def _noisy(P: np.ndarray, dx: float, noise: NoiseModel) -> np.ndarray:
    rng = np.random.default_rng(noise.seed)
    if noise.mode == "multinomial":
        weights = np.clip(P, 0.0, None) * dx
        total = weights.sum()
        counts = rng.multinomial(noise.n_atoms, weights / total)
        return counts * (total / (noise.n_atoms * dx))

    for _ in range(MAX_NOISE_DRAWS):
        sample = P * (1.0 + noise.relative * rng.standard_normal(P.shape))
        if np.all(sample >= 0.0):
            return sample
    raise NumericalError(
        f"relative noise {noise.relative} keeps producing negative densities; lower it"
    )


def synthesize_pattern(
    chi1: WavePacket,
    chi2: WavePacket,
    f_tilde: complex,
    noise: Optional[NoiseModel] = None,
) -> InterferencePattern:
    _check_grids(chi1, chi2)
    if abs(f_tilde) > 1.0 + 1e-12:
        raise DomainError(f"|f| = {abs(f_tilde):.6f} exceeds 1")
    a, b = chi1.values, chi2.values
    P = np.abs(a) ** 2 + np.abs(b) ** 2 + 2.0 * np.real(f_tilde * a * b.conj())
    if noise is not None:
        P = _noisy(P, chi1.dx, noise)
    return InterferencePattern(chi1.x, P, noise)


def extract_fidelity(
    pattern: InterferencePattern, chi1: WavePacket, chi2: WavePacket
) -> ExtractionResult:
    """
    Recover |f| and its phase from a measured density.

    The residual R = P - |chi1|^2 - |chi2|^2 is fitted by linear least squares
    to 2 Re[chi1 chi2^*] a - 2 Im[chi1 chi2^*] b, where f = a + i b.

    Raises:
        UnrecoverableGeometryError: if the envelopes barely overlap
    """
    _check_grids(chi1, chi2, pattern.x)
    a, b = chi1.values, chi2.values
    cross = a * b.conj()
    scale = np.max(np.abs(a) ** 2 + np.abs(b) ** 2)
    if np.max(np.abs(cross)) <= 1e-12 * scale:
        raise UnrecoverableGeometryError("packet envelopes do not overlap")

    residual = pattern.intensities - np.abs(a) ** 2 - np.abs(b) ** 2
    design = np.column_stack((2.0 * cross.real, -2.0 * cross.imag))
    (re_f, im_f), _, rank, singular = np.linalg.lstsq(design, residual, rcond=None)
    if rank < 2 or singular[-1] <= 1e-10 * singular[0]:
        raise UnrecoverableGeometryError(
            "fringe term has no independent quadrature; give the packets opposite wavevectors"
        )
    fit = design @ np.array([re_f, im_f])
    return ExtractionResult(
        magnitude=float(math.hypot(re_f, im_f)),
        phase=float(math.atan2(im_f, re_f)),
        residual_rms=float(np.sqrt(np.mean((residual - fit) ** 2))),
    )
