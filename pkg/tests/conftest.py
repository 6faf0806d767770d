import pytest

from src.domain.spinspace import SpinBasis, make_basis
from src.models.params import ModelParams


@pytest.fixture
def small_basis() -> SpinBasis:
    return make_basis(16)


@pytest.fixture(scope="session")
def basis_200() -> SpinBasis:
    return make_basis(200)


@pytest.fixture
def decay_params() -> ModelParams:
    """K=1, g_c=0.2, sigma=0.1: the decay of edge versus central Fock states."""
    return ModelParams(g_c=0.2, K=1.0, sigma=0.1)


@pytest.fixture
def regular_params() -> ModelParams:
    """K=2, g_c=0.17, sigma=0.5: regular classical motion, revivals of M_lk."""
    return ModelParams(g_c=0.17, K=2.0, sigma=0.5)
