"""
One-period propagators of the kicked condensate.

    U = exp[-i(mu Lz + g Lz^2) T] exp(-i K Lx)

The kick factor acts on the state first. Planck's constant inside the
exponent is 1; the effective hbar = 1/L only converts sigma into the
coupling change epsilon = sigma / L.
"""

from functools import lru_cache
from typing import Tuple

import numpy as np

from src.core.errors import DomainError
from src.domain.spinspace import (
    GeneratorSpectrum,
    SpinBasis,
    StateVector,
    UnitaryOperator,
    apply,
    op_lx,
)
from src.models.params import ModelParams
from src.utils.logging import get_logger

logger = get_logger(__name__)


@lru_cache(maxsize=16)
def lx_spectrum(n_atoms: int) -> GeneratorSpectrum:
    """Lx eigensystem, shared by every kick strength on the same basis."""
    logger.debug(f"Diagonalizing Lx for N={n_atoms}")
    return GeneratorSpectrum.of(op_lx(SpinBasis(n_atoms)))


def coupling(basis: SpinBasis, params: ModelParams, perturbed: bool) -> float:
    """K for the unperturbed propagator, K + sigma/L for the perturbed one."""
    return params.K + params.epsilon(basis) if perturbed else params.K


def diagonal_phases(basis: SpinBasis, params: ModelParams) -> np.ndarray:
    """Entries exp[-i(mu l + g l^2) T] of the free diagonal factor."""
    l = basis.fock_indices
    return np.exp(-1j * (params.mu * l + params.g(basis) * l * l) * params.T)


def build_floquet(
    basis: SpinBasis, params: ModelParams, perturbed: bool = False
) -> UnitaryOperator:
    K = coupling(basis, params, perturbed)
    kick = lx_spectrum(basis.n_atoms).exponential(K)
    matrix = diagonal_phases(basis, params)[:, None] * kick.matrix
    label = "U_eps" if perturbed else "U"
    return UnitaryOperator(basis, matrix, f"{label}(K={K:g})")


def build_floquet_pair(
    basis: SpinBasis, params: ModelParams
) -> Tuple[UnitaryOperator, UnitaryOperator]:
    """(U, U_eps)"""
    return build_floquet(basis, params, False), build_floquet(basis, params, True)


def free_propagator(basis: SpinBasis, params: ModelParams) -> UnitaryOperator:
    """Propagator of one period with the coupling field switched off."""
    return UnitaryOperator(basis, np.diag(diagonal_phases(basis, params)), "U_free")


def evolve(U: UnitaryOperator, s: StateVector, n_periods: int) -> StateVector:
    if n_periods < 0:
        raise DomainError(f"n_periods must be >= 0, got {n_periods}")
    for _ in range(n_periods):
        s = apply(U, s)
    return s
