"""
Finite spin space of N two-mode atoms.

The Hilbert space is spanned by the Fock states |l>, l = -L..L with L = N/2,
stored in row order i = l + L. Everything is parameterized by the atom number
N so half-integer L never has to be represented approximately: the ladder
coefficients are sqrt((N - i)(i + 1)), exact in integer arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg

from src.core.configs import settings
from src.core.errors import (
    BasisMismatchError,
    DomainError,
    EigendecompositionError,
    NonUnitaryError,
    NormDriftError,
    NumericalError,
)

FockIndex = Union[int, float, Fraction]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class SpinBasis:
    n_atoms: int

    def __post_init__(self):
        if isinstance(self.n_atoms, bool) or int(self.n_atoms) != self.n_atoms:
            raise DomainError(f"n_atoms must be an integer, got {self.n_atoms!r}")
        if self.n_atoms < 1:
            raise DomainError(f"n_atoms must be >= 1, got {self.n_atoms}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))

    @property
    def dim(self) -> int:
        return self.n_atoms + 1

    @property
    def L(self) -> Fraction:
        return Fraction(self.n_atoms, 2)

    @property
    def L_float(self) -> float:
        return self.n_atoms / 2

    @property
    def hbar_eff(self) -> float:
        return 2.0 / self.n_atoms

    @cached_property
    def fock_indices(self) -> np.ndarray:
        """l = i - L for every row i."""
        return _frozen(np.arange(self.dim, dtype=float) - self.L_float)

    @cached_property
    def labels(self) -> np.ndarray:
        """Fock indices as integers when L is integral, else as half-integers."""
        if self.n_atoms % 2:
            return self.fock_indices
        return _frozen(np.arange(self.dim) - self.n_atoms // 2)

    def row_of(self, l: FockIndex) -> int:
        """Row index i = l + L of a Fock index, rejecting values off the lattice."""
        doubled = 2.0 * float(l)
        twice = round(doubled)
        row = Fraction(twice, 2) + self.L
        if abs(doubled - twice) > 1e-9 or row.denominator != 1 or not 0 <= row <= self.n_atoms:
            raise DomainError(
                f"Fock index {l} outside {{-{self.L}, ..., {self.L}}} for N={self.n_atoms}"
            )
        return int(row)


def make_basis(n_atoms: int) -> SpinBasis:
    return SpinBasis(n_atoms)


def _check_basis(a: SpinBasis, b: SpinBasis) -> None:
    if a != b:
        raise BasisMismatchError(
            f"basis mismatch: N={a.n_atoms} versus N={b.n_atoms}"
        )


def _check_norm(amplitudes: np.ndarray, context: str) -> None:
    drift = abs(np.vdot(amplitudes, amplitudes).real - 1.0)
    if drift > settings.norm_drift_tol:
        raise NormDriftError(f"{context}: norm drift {drift:.3e} exceeds {settings.norm_drift_tol:.0e}")


@dataclass(frozen=True, eq=False)
class StateVector:
    basis: SpinBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.shape != (self.basis.dim,):
            raise DomainError(
                f"state needs {self.basis.dim} amplitudes, got {amplitudes.shape[0]}"
            )
        _check_norm(amplitudes, "state construction")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))

    @classmethod
    def normalized(cls, basis: SpinBasis, coefficients) -> "StateVector":
        coefficients = np.asarray(coefficients, dtype=np.complex128)
        norm = np.linalg.norm(coefficients)
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return cls(basis, coefficients / norm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    basis: SpinBasis
    matrix: np.ndarray
    label: str = "A"

    def __post_init__(self):
        matrix = np.array(self.matrix)
        if matrix.shape != (self.basis.dim, self.basis.dim):
            raise DomainError(f"{self.label}: expected {self.basis.dim}x{self.basis.dim}, got {matrix.shape}")
        asym = np.max(np.abs(matrix - matrix.conj().T)) if matrix.size else 0.0
        if asym > settings.hermitian_tol:
            raise DomainError(f"{self.label} is not Hermitian (max |A - A^dagger| = {asym:.3e})")
        object.__setattr__(self, "matrix", _frozen(matrix))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.matrix) or not np.any(self.matrix.imag)


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    basis: SpinBasis
    matrix: np.ndarray
    label: str = "U"

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.shape != (self.basis.dim, self.basis.dim):
            raise DomainError(f"{self.label}: expected {self.basis.dim}x{self.basis.dim}, got {matrix.shape}")
        defect = unitarity_defect(matrix)
        if defect >= settings.unitarity_tol:
            raise NonUnitaryError(
                f"{self.label} is not unitary: max |U^dagger U - I| = {defect:.3e}"
            )
        object.__setattr__(self, "matrix", _frozen(matrix))

    def adjoint(self) -> "UnitaryOperator":
        return UnitaryOperator(self.basis, self.matrix.conj().T, f"{self.label}^dagger")


def unitarity_defect(matrix: np.ndarray) -> float:
    """max-norm of U^dagger U - I"""
    product = matrix.conj().T @ matrix
    product[np.diag_indices_from(product)] -= 1.0
    return float(np.max(np.abs(product)))


def ladder_matrices(basis: SpinBasis) -> Tuple[np.ndarray, np.ndarray]:
    """
    Raising and lowering matrices L+ and L-.

    L+|l> = sqrt(L(L+1) - l(l+1)) |l+1>; with i = l + L the coefficient is
    sqrt((N - i)(i + 1)).

    Returns:
        tuple: (L+, L-) as real dense arrays
    """
    n = basis.n_atoms
    rows = np.arange(n)
    coefficients = np.sqrt((n - rows) * (rows + 1.0))
    l_plus = np.diag(coefficients, k=-1)
    return l_plus, l_plus.T.copy()


def op_lz(basis: SpinBasis) -> HermitianOperator:
    return HermitianOperator(basis, np.diag(basis.fock_indices), "Lz")


def op_lx(basis: SpinBasis) -> HermitianOperator:
    l_plus, l_minus = ladder_matrices(basis)
    return HermitianOperator(basis, 0.5 * (l_plus + l_minus), "Lx")


def op_ly(basis: SpinBasis) -> HermitianOperator:
    l_plus, l_minus = ladder_matrices(basis)
    return HermitianOperator(basis, -0.5j * (l_plus - l_minus), "Ly")


def identity_operator(basis: SpinBasis) -> UnitaryOperator:
    return UnitaryOperator(basis, np.eye(basis.dim), "I")


def fock_state(basis: SpinBasis, l: FockIndex) -> StateVector:
    amplitudes = np.zeros(basis.dim, dtype=np.complex128)
    amplitudes[basis.row_of(l)] = 1.0
    return StateVector(basis, amplitudes)


def random_hermitian(basis: SpinBasis, seed: int) -> HermitianOperator:
    """(G + G^dagger)/2 for a seeded standard complex Gaussian matrix G."""
    rng = np.random.default_rng(seed)
    shape = (basis.dim, basis.dim)
    g = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return HermitianOperator(basis, 0.5 * (g + g.conj().T), f"random(seed={seed})")


@dataclass(frozen=True, eq=False)
class GeneratorSpectrum:
    """Eigendecomposition of a Hermitian generator, reusable for any angle."""

    generator: HermitianOperator
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def of(cls, H: HermitianOperator) -> "GeneratorSpectrum":
        """
        Diagonalize H. Real symmetric generators (Lx, Lz) go through the real
        solver; eigenvector columns are renormalized.

        Raises:
            EigendecompositionError: if LAPACK fails or returns non-finite values
        """
        matrix = H.matrix.real if H.is_real else H.matrix
        try:
            eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise EigendecompositionError(H.label, matrix.shape, str(e)) from e
        if not (np.all(np.isfinite(eigenvalues)) and np.all(np.isfinite(eigenvectors))):
            raise EigendecompositionError(H.label, matrix.shape, "non-finite output")

        eigenvectors = eigenvectors / np.linalg.norm(eigenvectors, axis=0)
        return cls(H, _frozen(eigenvalues), _frozen(eigenvectors))

    def exponential(self, angle: float, label: Optional[str] = None) -> UnitaryOperator:
        """exp(-i * angle * H)"""
        phases = np.exp(-1j * angle * self.eigenvalues)
        matrix = (self.eigenvectors * phases) @ self.eigenvectors.conj().T
        return UnitaryOperator(
            self.generator.basis,
            matrix,
            label or f"exp(-i*{angle:g}*{self.generator.label})",
        )


def unitary_from_generator(
    H: HermitianOperator, angle: float, label: Optional[str] = None
) -> UnitaryOperator:
    """
    exp(-i * angle * H) through the eigendecomposition of H.

    Args:
        H: Hermitian generator
        angle: Rotation angle multiplying H
        label: Name for the resulting operator (defaults to exp(-i angle H))

    Returns:
        UnitaryOperator: the matrix exponential
    """
    return GeneratorSpectrum.of(H).exponential(angle, label)


def apply(U: UnitaryOperator, s: StateVector) -> StateVector:
    _check_basis(U.basis, s.basis)
    amplitudes = U.matrix @ s.amplitudes
    _check_norm(amplitudes, f"after applying {U.label}")
    return StateVector(s.basis, amplitudes)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>"""
    _check_basis(a.basis, b.basis)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(A: HermitianOperator, s: StateVector) -> float:
    _check_basis(A.basis, s.basis)
    value = np.vdot(s.amplitudes, A.matrix @ s.amplitudes)
    if abs(value.imag) > settings.expectation_imag_tol:
        raise NumericalError(
            f"<{A.label}> has imaginary part {value.imag:.3e}; operator or state is broken"
        )
    return float(value.real)
