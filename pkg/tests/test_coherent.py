import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.errors import DomainError
from src.domain.coherent import (
    coherent_amplitudes,
    coherent_state,
    coherent_state_by_displacement,
    is_coherent,
    overlap_probability,
    overlap_profile,
)
from src.domain.spinspace import fock_state, make_basis
from src.models.params import SphereAngle

ANGLES = [(0.4, 0.0), (1.0, 2.0), (math.pi / 2, 5.5), (2.9, 3.3)]

SPHERE_GRID = [
    (theta, 2.0 * math.pi * j / 10)
    for theta in np.linspace(0.1, math.pi - 0.1, 10)
    for j in range(10)
]


@pytest.mark.parametrize("n_atoms", [1, 2, 8, 16, 64])
def test_expansion_matches_displacement(n_atoms):
    basis = make_basis(n_atoms)
    for theta, phi in SPHERE_GRID:
        expanded = coherent_state(basis, SphereAngle(theta=theta, phi=phi))
        displaced = coherent_state_by_displacement(basis, SphereAngle.wrapped(theta, phi + math.pi))
        error = np.max(np.abs(expanded.amplitudes - displaced.amplitudes))
        assert error < 1e-10, f"theta={theta:.3f}, phi={phi:.3f}: {error:.2e}"


@pytest.mark.parametrize("theta, phi", ANGLES)
def test_fock_probabilities_do_not_depend_on_phi(theta, phi):
    basis = make_basis(64)
    a = coherent_state(basis, SphereAngle(theta=theta, phi=phi)).probabilities()
    b = coherent_state_by_displacement(basis, SphereAngle(theta=theta, phi=phi)).probabilities()
    assert np.allclose(a, b, atol=1e-10)


@pytest.mark.parametrize("theta", [1e-3, 0.5, math.pi / 2, 3.0, math.pi - 1e-3])
def test_normalization_at_large_L(basis_200, theta):
    amplitudes = coherent_amplitudes(basis_200.n_atoms, theta, 1.0)
    assert np.sum(np.abs(amplitudes) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_poles_are_extreme_fock_states(basis_200):
    south = coherent_state(basis_200, SphereAngle(theta=math.pi))
    north = coherent_state(basis_200, SphereAngle(theta=0.0))
    assert np.array_equal(south.amplitudes, fock_state(basis_200, -100).amplitudes)
    assert np.array_equal(north.amplitudes, fock_state(basis_200, 100).amplitudes)
    displaced = coherent_state_by_displacement(basis_200, SphereAngle(theta=math.pi))
    assert abs(displaced.amplitudes[0]) == pytest.approx(1.0, abs=1e-12)


def test_overlap_probability_matches_state(basis_200):
    angle = SphereAngle(theta=1.2, phi=0.3)
    probabilities = coherent_state(basis_200, angle).probabilities()
    for l in (-100, -31, 0, 2, 99):
        expected = probabilities[basis_200.row_of(l)]
        assert overlap_probability(basis_200, angle, l) == pytest.approx(expected, abs=1e-14)
    assert overlap_probability(basis_200, SphereAngle(theta=math.pi), -100) == 1.0
    assert overlap_probability(basis_200, SphereAngle(theta=0.0), -100) == 0.0


def test_overlap_profile_peaks_where_expected(basis_200):
    thetas = np.linspace(0.0, math.pi, 181)
    top = overlap_profile(basis_200, thetas, 100)
    bottom = overlap_profile(basis_200, thetas, -100)
    middle = overlap_profile(basis_200, thetas, 0)
    assert top[0] == pytest.approx(1.0)
    assert bottom[-1] == pytest.approx(1.0)
    assert np.argmax(middle) == 90
    assert middle.max() < 0.1


@pytest.mark.parametrize("l", [100, -100])
def test_extreme_fock_states_are_coherent(basis_200, l):
    assert is_coherent(fock_state(basis_200, l), tolerance=1e-3) is not None


def test_central_fock_state_is_not_coherent(basis_200):
    assert is_coherent(fock_state(basis_200, 0), tolerance=1e-3) is None


def test_is_coherent_recovers_angle(small_basis):
    found = is_coherent(coherent_state(small_basis, SphereAngle(theta=1.0, phi=2.0)), tolerance=1e-6)
    assert found is not None
    assert found.theta == pytest.approx(1.0, abs=0.02)
    assert found.phi == pytest.approx(2.0, abs=0.02)


def test_is_coherent_needs_positive_tolerance(small_basis):
    with pytest.raises(DomainError):
        is_coherent(fock_state(small_basis, 8), tolerance=0.0)


def test_sphere_angle_domain():
    with pytest.raises(ValidationError):
        SphereAngle(theta=4.0)
    with pytest.raises(ValidationError):
        SphereAngle(theta=1.0, phi=2 * math.pi)
    wrapped = SphereAngle.wrapped(1.0, -0.5)
    assert wrapped.phi == pytest.approx(2 * math.pi - 0.5)
