"""
Echo engine.

All echoes are built from two co-evolving blocks of states: kets evolved by
the unperturbed propagator U and bras evolved by the perturbed U_eps, so that

    m_lk(n) = <l| (U_eps^dagger)^n U^n |k> = <U_eps^n l | U^n k>.

Time is the integer kick count n; samples sit on kick boundaries only.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.configs import settings
from src.core.errors import DomainError, NormDriftError, NumericalError
from src.domain.floquet import build_floquet_pair
from src.domain.spinspace import (
    FockIndex,
    HermitianOperator,
    SpinBasis,
    StateVector,
    UnitaryOperator,
    _check_basis,
    fock_state,
)
from src.models.params import ModelParams
from src.models.results import IdentityCheck
from src.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class EchoCurve:
    params: ModelParams
    initial: str
    n: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        M = self.M
        if np.any(M > 1.0 + settings.probability_tol):
            raise NumericalError(
                f"echo curve for {self.initial} exceeds 1 (max {M.max():.12f})"
            )
        for array in (self.n, self.m):
            array.flags.writeable = False

    @property
    def M(self) -> np.ndarray:
        return np.abs(self.m) ** 2

    def samples(self) -> Iterator[Tuple[int, complex, float]]:
        for n, m, M in zip(self.n, self.m, self.M):
            yield int(n), complex(m), float(M)


@dataclass(frozen=True, eq=False)
class EchoMatrix:
    """M_lk(n) at one final index l; values has shape (len(n), len(k))."""

    basis: SpinBasis
    params: ModelParams
    l: FockIndex
    k: np.ndarray
    n: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.n), len(self.k)):
            raise DomainError(
                f"values shape {self.values.shape} does not match ({len(self.n)}, {len(self.k)})"
            )
        if np.any(self.values > 1.0 + settings.probability_tol):
            raise NumericalError(f"M_lk exceeds 1 for l={self.l}")
        for array in (self.k, self.n, self.values):
            array.flags.writeable = False

    @property
    def covers_full_range(self) -> bool:
        return np.array_equal(self.k, self.basis.fock_indices)

    def curve(self, k: FockIndex) -> np.ndarray:
        return self.values[:, self._column(k)]

    def at_time(self, n: int) -> np.ndarray:
        rows = np.flatnonzero(self.n == n)
        if rows.size == 0:
            raise DomainError(f"time n={n} not sampled (have {self.n[0]}..{self.n[-1]})")
        return self.values[rows[0]]

    def _column(self, k: FockIndex) -> int:
        columns = np.flatnonzero(self.k == k)
        if columns.size == 0:
            raise DomainError(f"k={k} not in the echo matrix")
        return int(columns[0])


def _check_block_norms(block: np.ndarray, context: str) -> None:
    drift = np.max(np.abs(np.sum(np.abs(block) ** 2, axis=0) - 1.0))
    if drift > settings.norm_drift_tol:
        raise NormDriftError(f"{context}: norm drift {drift:.3e}")


def co_evolve(
    U: UnitaryOperator,
    U_eps: UnitaryOperator,
    kets: np.ndarray,
    bras: np.ndarray,
    n_max: int,
) -> np.ndarray:
    """
    Overlaps <U_eps^n bra_j | U^n ket_i> for n = 0..n_max.

    Args:
        U: Unperturbed one-period propagator
        U_eps: Perturbed one-period propagator
        kets: (dim, m) block of initial kets, unit columns
        bras: (dim, p) block of initial bras, unit columns
        n_max: Last kick count

    Returns:
        np.ndarray: complex array of shape (n_max + 1, p, m)
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    _check_basis(U.basis, U_eps.basis)

    psi = np.array(kets, dtype=np.complex128, copy=True)
    phi = np.array(bras, dtype=np.complex128, copy=True)
    overlaps = np.empty((n_max + 1, phi.shape[1], psi.shape[1]), dtype=np.complex128)
    overlaps[0] = phi.conj().T @ psi
    for n in range(1, n_max + 1):
        psi = U.matrix @ psi
        phi = U_eps.matrix @ phi
        _check_block_norms(psi, f"{U.label} at n={n}")
        _check_block_norms(phi, f"{U_eps.label} at n={n}")
        overlaps[n] = phi.conj().T @ psi
    return overlaps


def _fock_block(basis: SpinBasis, indices: Iterable[FockIndex]) -> np.ndarray:
    rows = [basis.row_of(l) for l in indices]
    block = np.zeros((basis.dim, len(rows)), dtype=np.complex128)
    block[rows, np.arange(len(rows))] = 1.0
    return block


def echo_amplitudes(
    U: UnitaryOperator, U_eps: UnitaryOperator, initial: StateVector, n_max: int
) -> np.ndarray:
    """m(n) = <U_eps^n psi0 | U^n psi0> for n = 0..n_max"""
    _check_basis(U.basis, initial.basis)
    column = initial.amplitudes[:, None]
    return co_evolve(U, U_eps, column, column, n_max)[:, 0, 0]


def fidelity_curve_state(
    basis: SpinBasis,
    params: ModelParams,
    initial: StateVector,
    n_max: int,
    label: str = "state",
) -> EchoCurve:
    U, U_eps = build_floquet_pair(basis, params)
    m = echo_amplitudes(U, U_eps, initial, n_max)
    return EchoCurve(params, label, np.arange(n_max + 1), m)


def fidelity_curve(
    basis: SpinBasis, params: ModelParams, k: FockIndex, n_max: int
) -> EchoCurve:
    """
    Fidelity M(n) = |<k|(U_eps^dagger)^n U^n|k>|^2 of the Fock state |k>.

    Cost is O(n_max * dim^2): two states are co-evolved, never a matrix power.
    """
    logger.debug(f"fidelity_curve N={basis.n_atoms} k={k} n_max={n_max} {params}")
    return fidelity_curve_state(basis, params, fock_state(basis, k), n_max, f"k={k}")


def echo_column(
    basis: SpinBasis,
    params: ModelParams,
    k: FockIndex,
    n_set: Iterable[int],
    method: str = "two-state",
) -> Dict[int, StateVector]:
    """
    The vectors (U_eps^dagger)^n U^n |k> whose components are m_lk(n) for all l.

    Args:
        basis: Spin basis
        params: Model parameters
        k: Initial Fock index
        n_set: Kick counts to report
        method: "two-state" co-evolves every bra <l| under U_eps next to U^n|k>;
            "forward-backward" applies U n times, then U_eps^dagger n times

    Returns:
        dict: n -> StateVector
    """
    times = sorted({int(n) for n in n_set})
    if times and times[0] < 0:
        raise DomainError(f"kick counts must be >= 0, got {times[0]}")
    if not times:
        return {}
    U, U_eps = build_floquet_pair(basis, params)
    ket = fock_state(basis, k).amplitudes[:, None]

    if method == "two-state":
        overlaps = co_evolve(U, U_eps, ket, np.eye(basis.dim), times[-1])
        return {n: StateVector(basis, overlaps[n, :, 0]) for n in times}

    if method == "forward-backward":
        backward = U_eps.matrix.conj().T
        columns = {}
        forward = ket[:, 0]
        done = 0
        for n in times:
            for _ in range(n - done):
                forward = U.matrix @ forward
            done = n
            vector = forward
            for _ in range(n):
                vector = backward @ vector
            columns[n] = StateVector(basis, vector)
        return columns

    raise DomainError(f"unknown echo method {method!r}")


def echo_matrix(
    basis: SpinBasis,
    params: ModelParams,
    l: FockIndex,
    k_range: Sequence[FockIndex],
    n_max: int,
) -> EchoMatrix:
    """M_lk(n) for n = 0..n_max and every k in k_range at fixed final index l."""
    U, U_eps = build_floquet_pair(basis, params)
    kets = _fock_block(basis, k_range)
    bra = _fock_block(basis, [l])
    overlaps = co_evolve(U, U_eps, kets, bra, n_max)[:, 0, :]
    return EchoMatrix(
        basis,
        params,
        l,
        np.array(k_range),
        np.arange(n_max + 1),
        np.abs(overlaps) ** 2,
    )


def echo_operator(basis: SpinBasis, params: ModelParams, n: int) -> np.ndarray:
    """E(n) = (U_eps^dagger)^n U^n; entry (l, k) is m_lk(n)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    U, U_eps = build_floquet_pair(basis, params)
    return np.linalg.matrix_power(U_eps.matrix.conj().T, n) @ np.linalg.matrix_power(
        U.matrix, n
    )


def echo_matrix_at_times(
    basis: SpinBasis, params: ModelParams, l: FockIndex, n_set: Iterable[int]
) -> EchoMatrix:
    """Full k-range of M_lk(n) at selected times, one matrix power per time."""
    times = sorted({int(n) for n in n_set})
    row = basis.row_of(l)
    values = np.array([np.abs(echo_operator(basis, params, n)[row]) ** 2 for n in times])
    return EchoMatrix(
        basis,
        params,
        l,
        np.array(basis.labels),
        np.array(times, dtype=int),
        values.reshape(len(times), basis.dim),
    )


def stochasticity_defect(E: np.ndarray) -> Tuple[float, float]:
    """Largest deviation from 1 of the row and column sums of |E|^2."""
    probabilities = np.abs(E) ** 2
    return (
        float(np.max(np.abs(probabilities.sum(axis=1) - 1.0))),
        float(np.max(np.abs(probabilities.sum(axis=0) - 1.0))),
    )


def _coefficients(basis: SpinBasis, C: Union[StateVector, Sequence[complex]]) -> np.ndarray:
    if isinstance(C, StateVector):
        _check_basis(basis, C.basis)
        return C.amplitudes
    coefficients = np.asarray(C, dtype=np.complex128)
    if coefficients.shape != (basis.dim,):
        raise DomainError(f"expected {basis.dim} coefficients, got {coefficients.shape}")
    drift = abs(np.sum(np.abs(coefficients) ** 2) - 1.0)
    if drift > settings.probability_tol:
        raise DomainError(f"coefficients are not normalized (|sum |C|^2 - 1| = {drift:.3e})")
    return coefficients


def generalized_amplitude(
    C: Union[StateVector, Sequence[complex]], k: FockIndex, column: StateVector
) -> complex:
    """
    f(n) = sum_l C_l^* m_lk(n), the echo of an imperfectly prepared |k>.

    Args:
        C: Prepared-state coefficients over the Fock basis (normalized)
        k: Intended initial Fock index the column was computed for
        column: Echo column at time n, as returned by echo_column

    Returns:
        complex: the generalized fidelity amplitude
    """
    column.basis.row_of(k)
    return complex(np.vdot(_coefficients(column.basis, C), column.amplitudes))


def imperfect_fock_coefficients(basis: SpinBasis, k: FockIndex, leak: float) -> StateVector:
    """sqrt(1 - leak)|k> + sqrt(leak)|k'> with k' = k + 1 (or k - 1 at the top edge)."""
    if not 0.0 <= leak <= 1.0:
        raise DomainError(f"leak must lie in [0, 1], got {leak}")
    row = basis.row_of(k)
    neighbour = row + 1 if row < basis.n_atoms else row - 1
    coefficients = np.zeros(basis.dim, dtype=np.complex128)
    coefficients[row] = np.sqrt(1.0 - leak)
    coefficients[neighbour] = np.sqrt(leak)
    return StateVector(basis, coefficients)


def generalized_fidelity_curve(
    basis: SpinBasis,
    params: ModelParams,
    C: Union[StateVector, Sequence[complex]],
    k: FockIndex,
    n_max: int,
) -> EchoCurve:
    """|f(n)|^2 for a prepared state C intended to be |k>."""
    U, U_eps = build_floquet_pair(basis, params)
    bra = _coefficients(basis, C)[:, None]
    ket = fock_state(basis, k).amplitudes[:, None]
    f = co_evolve(U, U_eps, ket, bra, n_max)[:, 0, 0]
    return EchoCurve(params, f"prepared~k={k}", np.arange(n_max + 1), f)


def cumulative_sk(matrix: EchoMatrix, n: int) -> np.ndarray:
    """
    S_k(l, n) = sum_{k' <= k} M_lk'(n) over the full k-range.

    Raises:
        DomainError: if the matrix does not cover every k in -L..L in order
        NumericalError: if S at k = L differs from 1
    """
    if not matrix.covers_full_range:
        raise DomainError("cumulative S_k needs the full, ordered k-range -L..L")
    S = np.cumsum(matrix.at_time(n))
    if abs(S[-1] - 1.0) > settings.probability_tol:
        raise NumericalError(f"S_L = {S[-1]:.12f} at n={n}, expected 1")
    return S


def fidelity_at_time_vs_K(
    basis: SpinBasis,
    g_c: float,
    sigma: float,
    t_fixed: int,
    K_grid: Iterable[float],
    k_set: Sequence[FockIndex],
    mu: float = 1.0,
    T: float = 1.0,
) -> np.ndarray:
    """
    M(t_fixed) for every coupling in K_grid and every initial index in k_set.

    Returns:
        np.ndarray: shape (len(K_grid), len(k_set))
    """
    if t_fixed < 0:
        raise DomainError(f"t_fixed must be >= 0, got {t_fixed}")
    K_values = [float(K) for K in K_grid]
    if not np.all(np.isfinite(K_values)):
        raise DomainError("K grid must be finite")
    rows = [basis.row_of(k) for k in k_set]
    table = np.empty((len(K_values), len(rows)))
    for i, K in enumerate(K_values):
        params = ModelParams(mu=mu, g_c=g_c, K=K, T=T, sigma=sigma)
        U, U_eps = build_floquet_pair(basis, params)
        forward = np.linalg.matrix_power(U.matrix, t_fixed)[:, rows]
        perturbed = np.linalg.matrix_power(U_eps.matrix, t_fixed)[:, rows]
        table[i] = np.abs(np.sum(perturbed.conj() * forward, axis=0)) ** 2
    return table


def first_drop_below(curve: EchoCurve, level: float = 0.5) -> Optional[int]:
    """First kick count at which M falls below level, None if it never does."""
    below = np.flatnonzero(curve.M < level)
    return int(curve.n[below[0]]) if below.size else None


def observable_difference_check(
    basis: SpinBasis,
    params: ModelParams,
    A: HermitianOperator,
    k: FockIndex,
    n: int,
) -> IdentityCheck:
    """
    Compare A_kk^H(n) - A_kk^H0(n) with its expansion in generalized echoes.

    lhs comes from direct expectation values under U_eps^n and U^n. rhs is
    the primed double sum sum'_{ll'} m_kl m_kl'^* A_ll'^H0(n), which leaves out
    the single (k, k) term, minus (1 - M_kk(n)) A_kk^H0(n); that correction
    makes the two sides agree whenever the echo M_kk(n) differs from 1.
    """
    _check_basis(basis, A.basis)
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    row = basis.row_of(k)
    U, U_eps = build_floquet_pair(basis, params)
    forward = np.linalg.matrix_power(U.matrix, n)
    perturbed = np.linalg.matrix_power(U_eps.matrix, n)

    psi, psi_eps = forward[:, row], perturbed[:, row]
    a_h0 = np.vdot(psi, A.matrix @ psi).real
    a_h = np.vdot(psi_eps, A.matrix @ psi_eps).real
    lhs = a_h - a_h0

    m_k = (perturbed.conj().T @ forward)[row]
    a_heisenberg = forward.conj().T @ A.matrix @ forward
    full = np.vdot(m_k.conj(), a_heisenberg @ m_k.conj())
    if abs(full.imag) > settings.expectation_imag_tol:
        raise NumericalError(f"echo expansion of <A> has imaginary part {full.imag:.3e}")
    M_kk = abs(m_k[row]) ** 2
    a_kk = a_heisenberg[row, row].real
    primed = full.real - M_kk * a_kk
    correction = (1.0 - M_kk) * a_kk
    rhs = primed - correction
    return IdentityCheck(
        n=n,
        lhs=float(lhs),
        rhs=float(rhs),
        absdiff=float(abs(lhs - rhs)),
        primed_sum=float(primed),
        correction=float(correction),
    )
