import cmath
import math

import numpy as np
import pytest

from src.core.errors import DomainError, UnrecoverableGeometryError
from src.domain.fidelity import fidelity_curve
from src.domain.interference import (
    NoiseModel,
    WavePacket,
    counter_propagating_packets,
    extract_fidelity,
    make_grid,
    synthesize_pattern,
    two_well_fidelity,
)
from src.domain.spinspace import fock_state
from src.models.params import ModelParams

PARAMS = ModelParams(g_c=0.2, K=1.0)


@pytest.fixture(scope="module")
def packets():
    return counter_propagating_packets(width=1.0)


def test_default_grid():
    x = make_grid(0.0, 1.0)
    assert x.size == 2048
    assert x[0] == -10.0
    assert x[-1] == 10.0


def test_packet_needs_room_on_the_grid():
    with pytest.raises(DomainError):
        WavePacket(np.linspace(-3.0, 3.0, 200), 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        WavePacket(np.linspace(-10.0, 10.0, 200), 0.0, -1.0, 1.0)


def test_two_well_without_coupling_difference(small_basis):
    initial = fock_state(small_basis, 3)
    assert two_well_fidelity(small_basis, PARAMS, 0.0, initial, 40) == pytest.approx(1.0, abs=1e-12)
    assert two_well_fidelity(small_basis, PARAMS, 0.05, initial, 0) == pytest.approx(1.0, abs=1e-15)


def test_two_well_is_the_fidelity_amplitude(small_basis):
    delta_K = 0.04
    f = two_well_fidelity(small_basis, PARAMS, delta_K, fock_state(small_basis, -2), 50)
    sigma = small_basis.L_float * delta_K
    curve = fidelity_curve(small_basis, PARAMS.with_sigma(sigma), -2, 50)
    assert abs(f - curve.m[50]) < 1e-12


def test_two_well_frozen_after_switch_off(small_basis):
    initial = fock_state(small_basis, 6)
    before = two_well_fidelity(small_basis, PARAMS, 0.03, initial, 25)
    after = two_well_fidelity(small_basis, PARAMS, 0.03, initial, 25, n_free=40)
    assert abs(before - after) < 1e-12


def test_no_fringes_without_fidelity(packets):
    chi1, chi2 = packets
    pattern = synthesize_pattern(chi1, chi2, 0.0)
    expected = np.abs(chi1.values) ** 2 + np.abs(chi2.values) ** 2
    assert np.allclose(pattern.intensities, expected, atol=1e-15)


def test_full_constructive_overlap(packets):
    chi1, _ = packets
    pattern = synthesize_pattern(chi1, chi1, 1.0)
    assert np.allclose(pattern.intensities, 4.0 * np.abs(chi1.values) ** 2, atol=1e-14)


def test_fringe_term_of_counter_propagating_packets(packets):
    chi1, chi2 = packets
    f = 0.7 * cmath.exp(0.9j)
    pattern = synthesize_pattern(chi1, chi2, f)
    fringes = pattern.intensities - np.abs(chi1.values) ** 2 - np.abs(chi2.values) ** 2
    envelope = 2 * abs(f) * np.abs(chi1.values) * np.abs(chi2.values)
    expected = envelope * np.cos(2 * chi1.q * chi1.x + cmath.phase(f))
    assert np.allclose(fringes, expected, atol=1e-13)


def test_pattern_is_non_negative(packets):
    chi1, chi2 = packets
    for magnitude in (0.0, 0.5, 1.0):
        for phase in np.arange(8) * math.pi / 4:
            pattern = synthesize_pattern(chi1, chi2, magnitude * cmath.exp(1j * phase))
            assert pattern.intensities.min() >= -1e-12


def test_synthesize_rejects_bad_input(packets):
    chi1, chi2 = packets
    with pytest.raises(DomainError):
        synthesize_pattern(chi1, chi2, 1.2)
    other = WavePacket(np.linspace(-12.0, 12.0, 1000), 0.5, 1.0, -chi1.q)
    with pytest.raises(DomainError):
        synthesize_pattern(chi1, other, 0.3)


def test_noiseless_extraction(packets):
    chi1, chi2 = packets
    for magnitude in (0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0):
        for phase in np.linspace(-math.pi, math.pi, 12, endpoint=False):
            f = magnitude * cmath.exp(1j * phase)
            result = extract_fidelity(synthesize_pattern(chi1, chi2, f), chi1, chi2)
            assert result.magnitude == pytest.approx(magnitude, abs=1e-10)
            assert abs(cmath.exp(1j * result.phase) - cmath.exp(1j * phase)) < 1e-8
            assert result.residual_rms < 1e-12


def test_extraction_with_one_percent_noise(packets):
    chi1, chi2 = packets
    f = 0.6 * cmath.exp(0.3j)
    within = 0
    for seed in range(100):
        pattern = synthesize_pattern(chi1, chi2, f, NoiseModel(relative=0.01, seed=seed))
        assert pattern.intensities.min() >= 0.0
        result = extract_fidelity(pattern, chi1, chi2)
        within += abs(result.magnitude - abs(f)) <= 0.02 * abs(f)
    assert within >= 95


def test_zero_fidelity_stays_below_noise_floor(packets):
    chi1, chi2 = packets
    pattern = synthesize_pattern(chi1, chi2, 0.0, NoiseModel(relative=0.01, seed=7))
    assert extract_fidelity(pattern, chi1, chi2).magnitude < 0.01


def test_noise_is_seeded(packets):
    chi1, chi2 = packets
    noise = NoiseModel(relative=0.01, seed=3)
    a = synthesize_pattern(chi1, chi2, 0.5, noise).intensities
    b = synthesize_pattern(chi1, chi2, 0.5, noise).intensities
    assert np.array_equal(a, b)


def test_multinomial_noise_keeps_total_density(packets):
    chi1, chi2 = packets
    exact = synthesize_pattern(chi1, chi2, 0.4)
    noise = NoiseModel(mode="multinomial", n_atoms=50_000, seed=1)
    counted = synthesize_pattern(chi1, chi2, 0.4, noise)
    assert counted.intensities.min() >= 0.0
    assert np.sum(counted.intensities) == pytest.approx(np.sum(exact.intensities), rel=1e-9)
    assert np.array_equal(counted.intensities, synthesize_pattern(chi1, chi2, 0.4, noise).intensities)


def test_separated_envelopes_are_unrecoverable():
    x = np.linspace(-100.0, 100.0, 4001)
    chi1 = WavePacket(x, -60.0, 1.0, 4 * math.pi)
    chi2 = WavePacket(x, 60.0, 1.0, -4 * math.pi)
    pattern = synthesize_pattern(chi1, chi2, 0.5)
    with pytest.raises(UnrecoverableGeometryError):
        extract_fidelity(pattern, chi1, chi2)


def test_parallel_wavevectors_are_unrecoverable(packets):
    chi1, _ = packets
    chi2 = WavePacket(chi1.x, 0.5, 1.0, chi1.q)
    pattern = synthesize_pattern(chi1, chi2, 0.5)
    with pytest.raises(UnrecoverableGeometryError):
        extract_fidelity(pattern, chi1, chi2)
