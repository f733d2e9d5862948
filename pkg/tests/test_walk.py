"""Coin flip, conditional shift, evolution and the ideal-walk reference."""

import math

import numpy as np
import pytest

from blochwalk import (CoinPulse, CoinWalkerState, SiteIndexing, SpinQuantum,
                       WalkSchedule, coin_unitary, conditional_shift, evolve,
                       ideal_sigma, ideal_walk, initial_state, reduce_walker,
                       site_state, step)
from blochwalk.walk import step1_reference, step2_reference

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def _frobenius(a, b):
    return float(np.linalg.norm(a - b))


# ---------------------------------------------------------------------------
# coin unitary
# ---------------------------------------------------------------------------

def test_zero_pulse_is_identity():
    assert np.array_equal(coin_unitary(CoinPulse((0.0, 0.0, 0.0))), np.eye(2))


def test_hadamard_pulse_realizes_coin_flip():
    u = coin_unitary(CoinPulse.hadamard())
    assert np.abs(u - (-1j) * HADAMARD).max() < 1e-15
    # global phase -i squares to -1
    assert np.abs(u @ u + np.eye(2)).max() < 1e-15


def test_z_pulse_is_diagonal_phase():
    u = coin_unitary(CoinPulse((0.0, 0.0, math.pi)))
    assert np.abs(u - np.diag([-1j, 1j])).max() < 1e-15


def test_coin_unitary_is_unitary():
    u = coin_unitary(CoinPulse((0.3, -1.2, 0.8)))
    assert np.abs(u.conj().T @ u - np.eye(2)).max() < 1e-14


# ---------------------------------------------------------------------------
# conditional shift and single steps
# ---------------------------------------------------------------------------

def test_conditional_shift_moves_branches_oppositely():
    idx = SiteIndexing(6)
    spin = SpinQuantum(30)
    sched = WalkSchedule.site_aligned(idx, 1)
    w0 = site_state(idx, spin, 0).amplitudes
    shifted = conditional_shift(CoinWalkerState(spin, w0 / math.sqrt(2.0),
                                                w0 / math.sqrt(2.0)), sched)
    up_target = site_state(idx, spin, 1).amplitudes
    down_target = site_state(idx, spin, -1).amplitudes
    assert abs(np.vdot(up_target, shifted.up)) * math.sqrt(2.0) \
        == pytest.approx(1.0, abs=1e-12)
    assert abs(np.vdot(down_target, shifted.down)) * math.sqrt(2.0) \
        == pytest.approx(1.0, abs=1e-12)


def test_step_without_coin_flip_is_pure_shift():
    idx = SiteIndexing(6)
    spin = SpinQuantum(30)
    sched = WalkSchedule.site_aligned(idx, 1)
    state = initial_state(idx, spin)
    moved = step(state, CoinPulse((0.0, 0.0, 0.0)), sched)
    target = site_state(idx, spin, 1).amplitudes
    assert abs(np.vdot(target, moved.up)) == pytest.approx(1.0, abs=1e-12)
    assert np.abs(moved.down).max() == 0.0


def test_norm_preserved_over_many_steps():
    idx = SiteIndexing(6)
    spin = SpinQuantum(20)
    sched = WalkSchedule.site_aligned(idx, 100)
    state = initial_state(idx, spin, coin=(1.0, 1.0j))
    for s in evolve(state, CoinPulse.hadamard(), sched):
        pass
    assert s.norm == pytest.approx(1.0, abs=1e-12)


def test_schedule_validation():
    idx = SiteIndexing(6)
    with pytest.raises(ValueError):
        WalkSchedule.site_aligned(idx, -1)
    assert WalkSchedule.site_aligned(idx, 3).kappa_T \
        == pytest.approx(idx.delta_phi)


def test_initial_state_normalizes_coin():
    idx = SiteIndexing(6)
    spin = SpinQuantum(10)
    state = initial_state(idx, spin, coin=(3.0, 4.0j))
    assert state.norm == pytest.approx(1.0, abs=1e-14)


# ---------------------------------------------------------------------------
# reduced walker state and the closed-form references
# ---------------------------------------------------------------------------

def test_reduced_product_state_is_pure():
    idx = SiteIndexing(6)
    spin = SpinQuantum(30)
    rho = reduce_walker(initial_state(idx, spin, coin=(1.0, 1.0)))
    rho.validate()
    assert rho.purity() == pytest.approx(1.0, abs=1e-12)


def test_one_step_density_matrix_matches_closed_form():
    idx = SiteIndexing(6)
    spin = SpinQuantum(50)
    sched = WalkSchedule.site_aligned(idx, 1)
    states = evolve(initial_state(idx, spin), CoinPulse.hadamard(), sched)
    rho = reduce_walker(states[1])
    rho.validate()
    ref = step1_reference(idx, spin)
    assert _frobenius(rho.entries, ref.entries) < 1e-12


def test_one_step_purity_set_by_site_overlap():
    idx = SiteIndexing(6)
    spin = SpinQuantum(50)
    sched = WalkSchedule.site_aligned(idx, 1)
    states = evolve(initial_state(idx, spin), CoinPulse.hadamard(), sched)
    rho = reduce_walker(states[1])
    ov = abs(site_state(idx, spin, 1).inner(site_state(idx, spin, -1)))
    assert rho.purity() == pytest.approx(0.5 * (1.0 + ov * ov), abs=1e-12)


def test_two_step_density_matrix_matches_closed_form():
    idx = SiteIndexing(6)
    spin = SpinQuantum(50)
    sched = WalkSchedule.site_aligned(idx, 2)
    states = evolve(initial_state(idx, spin), CoinPulse.hadamard(), sched)
    rho = reduce_walker(states[2])
    rho.validate()
    ref = step2_reference(idx, spin)
    assert _frobenius(rho.entries, ref.entries) < 1e-12


def test_density_matrix_validation_rejects_bad_input():
    from blochwalk import DensityMatrix
    spin = SpinQuantum(2)
    with pytest.raises(ValueError):
        DensityMatrix(spin, np.diag([0.7, 0.2, 0.2])).validate()  # trace
    bad = np.zeros((3, 3), dtype=complex)
    bad[0, 1] = 1.0
    bad[0, 0] = 1.0
    with pytest.raises(ValueError):
        DensityMatrix(spin, bad).validate()                       # Hermiticity


# ---------------------------------------------------------------------------
# ideal orthogonal-state walk
# ---------------------------------------------------------------------------

def test_ideal_walk_starts_localized():
    probs = ideal_walk(6, 0, HADAMARD)
    assert len(probs) == 1
    idx = SiteIndexing(6)
    expect = (idx.site_numbers == 0).astype(float)
    assert np.array_equal(probs[0], expect)


def test_ideal_walk_two_steps_quarter_half_quarter():
    probs = ideal_walk(12, 2, HADAMARD)[2]
    sites = SiteIndexing(12).site_numbers
    expect = np.zeros(12)
    expect[sites == 2] = 0.25
    expect[sites == 0] = 0.5
    expect[sites == -2] = 0.25
    assert np.abs(probs - expect).max() < 1e-14


def test_ideal_walk_parity_and_normalization():
    sites = SiteIndexing(12).site_numbers
    for k, probs in enumerate(ideal_walk(12, 5, HADAMARD)):
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)
        # after k steps only sites with n = k (mod 2) are occupied
        assert np.abs(probs[(np.abs(sites) % 2) != (k % 2)]).max() == 0.0


def test_ideal_walk_symmetric_coin_state():
    # coin (1, i)/sqrt(2) makes the Hadamard walk left-right symmetric
    idx = SiteIndexing(16)
    probs = ideal_walk(16, 5, HADAMARD, coin_state=(1.0, 1.0j))[5]
    by_site = {int(n): p for n, p in zip(idx.site_numbers, probs)}
    for n, p in by_site.items():
        assert p == pytest.approx(by_site[idx.wrap(-n)], abs=1e-12)


def test_ideal_walk_input_validation():
    with pytest.raises(ValueError):
        ideal_walk(1, 2, HADAMARD)
    with pytest.raises(ValueError):
        ideal_walk(6, -1, HADAMARD)


def test_ideal_sigma_examples():
    idx = SiteIndexing(12)
    localized = (idx.site_numbers == 0).astype(float)
    assert ideal_sigma(localized, idx) == 0.0
    two_step = ideal_walk(12, 2, HADAMARD)[2]
    assert ideal_sigma(two_step, idx) \
        == pytest.approx(math.sqrt(2.0) * idx.delta_phi, abs=1e-12)


def test_ideal_sigma_rejects_unnormalized():
    idx = SiteIndexing(6)
    with pytest.raises(ValueError):
        ideal_sigma(np.full(6, 0.1), idx)
