"""Regression runs at the full N=200 scale. Select with `pytest -m slow`."""

import numpy as np
import pytest

from src.domain.fidelity import (
    cumulative_sk,
    echo_matrix,
    echo_matrix_at_times,
    echo_operator,
    fidelity_at_time_vs_K,
    fidelity_curve,
    first_drop_below,
    stochasticity_defect,
)
from src.domain.peaks import detect_peaks, track_peak_centers
from src.models.experiment import build_config
from src.models.params import ModelParams
from src.services.experiments import run

pytestmark = pytest.mark.slow

N_MAX = 2000


def drop_time(basis, params, k) -> int:
    """First n with M(n) < 0.5; a curve that never drops counts as later than N_MAX."""
    n = first_drop_below(fidelity_curve(basis, params, k, N_MAX))
    return N_MAX + 1 if n is None else n


@pytest.fixture(scope="module")
def regular_echoes(basis_200):
    params = ModelParams(g_c=0.17, K=2.0, sigma=0.5)
    return echo_matrix(basis_200, params, -100, basis_200.labels, N_MAX)


def test_edge_states_decay_last(basis_200, decay_params):
    drops = {k: drop_time(basis_200, decay_params, k) for k in (-100, -75, 0, 75, 100)}
    print(f"first drop below 0.5: {drops}")
    assert drops[100] > drops[-100]
    for k in (-75, 0, 75):
        assert drops[100] > drops[k]
        assert drops[-100] > drops[k]


def test_decay_speeds_up_away_from_the_edge(basis_200, decay_params):
    drops = [drop_time(basis_200, decay_params, k) for k in (100, 99, 98, 97)]
    print(f"first drop below 0.5 for k=100..97: {drops}")
    assert all(a >= b for a, b in zip(drops, drops[1:]))


def test_edge_states_survive_longer_over_K(basis_200):
    K_grid = np.arange(0.5, 3.0 + 1e-9, 0.05)
    table = fidelity_at_time_vs_K(basis_200, 0.2, 0.01, 1000, K_grid, [-100, 100, -50, 0, 50])
    edge = table[:, :2].mean(axis=0)
    interior = table[:, 2:].mean(axis=0)
    print(f"mean M(1000), edge {edge}, interior {interior}")
    assert edge.min() >= 2.0 * interior.max()


def test_window_where_top_edge_outlives_bottom_edge(basis_200):
    K_grid = np.arange(0.0, 4.0 + 1e-9, 0.05)
    table = fidelity_at_time_vs_K(basis_200, 0.2, 0.04, 1000, K_grid, [100, -100])
    window = (table[:, 0] > 0.5) & (table[:, 1] < 0.2)
    print(f"K with M_top > 0.5 and M_bottom < 0.2: {K_grid[window]}")
    assert window.any()


def test_revival_of_the_bottom_edge(regular_echoes):
    curve = regular_echoes.curve(-100)
    tracks, _ = track_peak_centers({-100: curve}, threshold_frac=0.1, min_gap=20)
    second = tracks[0].second
    print(f"second peak: {second}")
    assert second is not None
    assert 1405 <= second.center_n <= 1495
    assert np.all(curve[200:1301] < 0.1 * curve.max())


def test_second_peak_splits_then_merges(regular_echoes):
    split = detect_peaks(regular_echoes.curve(-98), threshold_frac=0.1, min_gap=20)
    print(f"peaks at k=-98: {[p.center_n for p in split]}")
    assert len(split) == 3

    curves = {k: regular_echoes.curve(k) for k in regular_echoes.k}
    _, merge_k = track_peak_centers(curves, threshold_frac=0.1, min_gap=20)
    print(f"peaks merge at k={merge_k}")
    assert merge_k is not None
    assert 70 <= merge_k < 79


def test_full_k_range_sums_to_one_at_every_n(regular_echoes):
    assert regular_echoes.covers_full_range
    assert np.allclose(regular_echoes.values.sum(axis=1), 1.0, atol=1e-10)


@pytest.mark.parametrize("n", [100, 500, 1450])
def test_echo_operator_is_doubly_stochastic(basis_200, regular_params, n):
    rows, columns = stochasticity_defect(echo_operator(basis_200, regular_params, n))
    assert rows < 1e-10
    assert columns < 1e-10


def test_cumulative_sk_at_bottom_edge(basis_200, regular_params):
    times = [100, 500, 1000, 1450]
    matrix = echo_matrix_at_times(basis_200, regular_params, -100, times)
    for t in times:
        S = cumulative_sk(matrix, t)
        assert np.all(np.diff(S) >= -1e-12)
        assert S[-1] == pytest.approx(1.0, abs=1e-10)


def test_decay_recipe_is_deterministic_across_workers(tmp_path):
    bodies = []
    for workers in (1, 3):
        out = tmp_path / f"decay_{workers}.csv"
        config = build_config(
            {
                "kind": "fidelity-curve",
                "recipe": "fig1",
                "n_atoms": 200,
                "K": 1.0,
                "g_c": 0.2,
                "sigma": 0.1,
                "k_set": "-100,-75,0,75,100",
                "n_max": 500,
                "workers": workers,
                "out": str(out),
            }
        )
        run(config)
        bodies.append(out.read_bytes())
    assert bodies[0] == bodies[1]
