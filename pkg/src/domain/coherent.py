"""
SU(2) coherent states on the Fock basis.

The expansion used here is

    |alpha> = sum_l (z*)^(l+L) / (1 + |z|^2)^L * sqrt(binom(2L, L+l)) |l>,
    z = -exp(-i phi) cot(theta/2),

evaluated in log-space: with i = l + L the modulus is
cos(theta/2)^i sin(theta/2)^(N-i) sqrt(binom(N, i)).
The displacement exp(alpha* L+ - alpha L-)|-L> with
alpha = (pi - theta)/2 exp(-i phi) yields the same state at phi + pi;
the Fock probabilities |<alpha|l>|^2 do not depend on phi at all.
"""

import math
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, xlogy

from src.core.errors import DomainError
from src.domain.spinspace import (
    FockIndex,
    HermitianOperator,
    SpinBasis,
    StateVector,
    fock_state,
    ladder_matrices,
    unitary_from_generator,
)
from src.models.params import SphereAngle
from src.utils.logging import get_logger

logger = get_logger(__name__)

THETA_GRID = 181
PHI_GRID = 72


def _log_binomials(n_atoms: int) -> np.ndarray:
    i = np.arange(n_atoms + 1)
    return gammaln(n_atoms + 1) - gammaln(i + 1) - gammaln(n_atoms - i + 1)


def _log_moduli(n_atoms: int, theta) -> np.ndarray:
    """log |<l|alpha>| for every row; theta may be an array (broadcast on a new last axis)."""
    theta = np.asarray(theta, dtype=float)[..., None]
    i = np.arange(n_atoms + 1)
    cos_half = np.sin(0.5 * (np.pi - theta))
    sin_half = np.sin(0.5 * theta)
    return xlogy(i, cos_half) + xlogy(n_atoms - i, sin_half) + 0.5 * _log_binomials(n_atoms)


def coherent_amplitudes(n_atoms: int, theta, phi) -> np.ndarray:
    """
    Coherent-state amplitudes for arrays of angles.

    Args:
        n_atoms: Atom number N
        theta: Polar angle(s)
        phi: Azimuthal angle(s), broadcast against theta

    Returns:
        np.ndarray: shape broadcast(theta, phi) + (N + 1,)
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    i = np.arange(n_atoms + 1)
    # arg(z*) = phi + pi
    phases = np.exp(1j * (phi[..., None] + np.pi) * i)
    return np.exp(_log_moduli(n_atoms, theta)) * phases


def coherent_state(basis: SpinBasis, angle: SphereAngle) -> StateVector:
    if angle.theta == math.pi:
        return fock_state(basis, -basis.L)
    if angle.theta == 0.0:
        return fock_state(basis, basis.L)
    return StateVector(basis, coherent_amplitudes(basis.n_atoms, angle.theta, angle.phi))


def coherent_state_by_displacement(basis: SpinBasis, angle: SphereAngle) -> StateVector:
    """exp(alpha* L+ - alpha L-)|-L>, the defining construction of |alpha>."""
    l_plus, l_minus = ladder_matrices(basis)
    alpha = angle.alpha
    generator = alpha.conjugate() * l_plus - alpha * l_minus
    # exp(G) = exp(-i H) with H = iG Hermitian
    displacement = unitary_from_generator(
        HermitianOperator(basis, 1j * generator, "i(alpha* L+ - alpha L-)"), 1.0
    )
    return StateVector(basis, displacement.matrix[:, 0])


def overlap_probability(basis: SpinBasis, angle: SphereAngle, l: FockIndex) -> float:
    """|<alpha|l>|^2 in closed form."""
    row = basis.row_of(l)
    if angle.theta == math.pi:
        return 1.0 if row == 0 else 0.0
    if angle.theta == 0.0:
        return 1.0 if row == basis.n_atoms else 0.0
    return float(np.exp(2.0 * _log_moduli(basis.n_atoms, angle.theta)[row]))


def overlap_profile(basis: SpinBasis, thetas, l: FockIndex) -> np.ndarray:
    """|<alpha|l>|^2 along a theta grid."""
    row = basis.row_of(l)
    return np.exp(2.0 * _log_moduli(basis.n_atoms, thetas)[..., row])


def _infidelity(state: StateVector, theta: float, phi: float) -> float:
    amplitudes = coherent_amplitudes(state.basis.n_atoms, theta, phi)
    return 1.0 - abs(np.vdot(amplitudes, state.amplitudes)) ** 2


def _grid_search(state: StateVector) -> Tuple[float, float, float]:
    thetas = np.linspace(0.0, np.pi, THETA_GRID)
    phis = np.arange(PHI_GRID) * (2.0 * np.pi / PHI_GRID)
    best = (np.inf, 0.0, 0.0)
    for theta in thetas:
        amplitudes = coherent_amplitudes(state.basis.n_atoms, theta, phis)
        overlaps = np.abs(amplitudes.conj() @ state.amplitudes) ** 2
        j = int(np.argmax(overlaps))
        if 1.0 - overlaps[j] < best[0]:
            best = (1.0 - float(overlaps[j]), float(theta), float(phis[j]))
    return best


def is_coherent(state: StateVector, tolerance: float = 1e-3) -> Optional[SphereAngle]:
    """
    Find a coherent state matching state to within tolerance in infidelity.

    A coarse theta x phi grid is refined by bounded golden-section searches in
    each angle in turn. This is a heuristic meant for yes/no classification.

    Returns:
        SphereAngle or None: the best angle if 1 - |<alpha|state>|^2 < tolerance
    """
    if tolerance <= 0.0:
        raise DomainError(f"tolerance must be positive, got {tolerance}")
    infidelity, theta, phi = _grid_search(state)
    d_theta = np.pi / (THETA_GRID - 1)
    d_phi = 2.0 * np.pi / PHI_GRID

    for _ in range(2):
        if infidelity < 1e-15:
            break
        result = minimize_scalar(
            lambda t: _infidelity(state, t, phi),
            bounds=(max(theta - d_theta, 0.0), min(theta + d_theta, np.pi)),
            method="bounded",
        )
        if result.fun < infidelity:
            infidelity, theta = float(result.fun), float(result.x)
        result = minimize_scalar(
            lambda p: _infidelity(state, theta, p),
            bounds=(phi - d_phi, phi + d_phi),
            method="bounded",
        )
        if result.fun < infidelity:
            infidelity, phi = float(result.fun), float(result.x)

    logger.debug(f"is_coherent: best infidelity {infidelity:.3e} at theta={theta:.6f}, phi={phi:.6f}")
    if infidelity < tolerance:
        return SphereAngle.wrapped(theta, phi)
    return None
