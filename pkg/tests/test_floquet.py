import numpy as np
import pytest

from src.core.errors import DomainError
from src.domain.fidelity import fidelity_curve
from src.domain.floquet import (
    build_floquet,
    build_floquet_pair,
    coupling,
    diagonal_phases,
    evolve,
    free_propagator,
)
from src.domain.spinspace import fock_state, make_basis, unitarity_defect
from src.models.params import ModelParams


def test_zero_sigma_pair_is_identical(small_basis):
    U, U_eps = build_floquet_pair(small_basis, ModelParams(g_c=0.2, K=1.0, sigma=0.0))
    assert np.array_equal(U.matrix, U_eps.matrix)


@pytest.mark.parametrize("g", [0.0, 0.3, 2.5])
def test_spin_half_diagonal_factor(g):
    basis = make_basis(1)
    params = ModelParams(g_c=g * basis.L_float, K=0.8)
    phases = diagonal_phases(basis, params)
    # rows l = -1/2, +1/2
    assert phases[0] == pytest.approx(np.exp(1j * (0.5 - g / 4)), abs=1e-15)
    assert phases[1] == pytest.approx(np.exp(-1j * (0.5 + g / 4)), abs=1e-15)


def test_full_size_operator_is_unitary(basis_200, decay_params):
    U = build_floquet(basis_200, decay_params)
    assert U.matrix.shape == (201, 201)
    assert unitarity_defect(U.matrix) < 1e-12


@pytest.mark.parametrize("K", [0.3, 1.0, 2.7])
def test_spin_half_survival_amplitude(K):
    basis = make_basis(1)
    params = ModelParams(mu=1.0, g_c=0.35, K=K)
    U = build_floquet(basis, params)
    g = params.g(basis)
    expected = np.exp(-1j * (0.5 + g / 4)) * np.cos(K / 2)
    assert U.matrix[1, 1] == pytest.approx(expected, abs=1e-14)


def test_perturbation_consistency(small_basis):
    params = ModelParams(g_c=0.2, K=1.1, sigma=0.4)
    perturbed = build_floquet(small_basis, params, perturbed=True)
    shifted = build_floquet(
        small_basis, params.with_coupling(coupling(small_basis, params, True)).with_sigma(0.0)
    )
    assert np.max(np.abs(perturbed.matrix - shifted.matrix)) < 1e-14


def test_epsilon_is_derived_per_basis():
    params = ModelParams(g_c=0.2, K=1.0, sigma=0.5)
    assert coupling(make_basis(200), params, True) == pytest.approx(1.005)
    assert coupling(make_basis(10), params, True) == pytest.approx(1.1)
    assert coupling(make_basis(10), params, False) == 1.0


def test_evolve_zero_periods(small_basis, decay_params):
    state = fock_state(small_basis, 4)
    U = build_floquet(small_basis, decay_params)
    assert evolve(U, state, 0) is state


def test_evolve_semigroup(small_basis, decay_params):
    state = fock_state(small_basis, -2)
    U = build_floquet(small_basis, decay_params)
    joined = evolve(U, state, 17)
    split = evolve(U, evolve(U, state, 9), 8)
    assert np.allclose(joined.amplitudes, split.amplitudes, atol=1e-12)


def test_evolve_rejects_negative_periods(small_basis, decay_params):
    with pytest.raises(DomainError):
        evolve(build_floquet(small_basis, decay_params), fock_state(small_basis, 0), -1)


def test_free_propagator_keeps_fock_populations(small_basis, decay_params):
    state = fock_state(small_basis, 5)
    free = evolve(free_propagator(small_basis, decay_params), state, 12)
    assert np.allclose(free.probabilities(), state.probabilities(), atol=1e-15)


def test_spin_half_fidelity_is_independent_of_g():
    basis = make_basis(1)
    weak = fidelity_curve(basis, ModelParams(g_c=0.05, K=1.3, sigma=0.2), 0.5, 300)
    strong = fidelity_curve(basis, ModelParams(g_c=4.0, K=1.3, sigma=0.2), 0.5, 300)
    assert np.allclose(weak.M, strong.M, atol=1e-12)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(g_c=0.2, K=1.0, T=0.0)
    with pytest.raises(ValueError):
        ModelParams(g_c=0.2, K=1.0, sigma=-0.1)
    with pytest.raises(ValueError):
        ModelParams(g_c=float("nan"), K=1.0)
