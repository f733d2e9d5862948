"""Phase-space kernel weights, Wigner grids, marginals and site binning."""

import math

import numpy as np
import pytest

from blochwalk import (CoinPulse, DensityMatrix, NumericalInvariantError,
                       PhiDistribution, SiteIndexing, SpinQuantum,
                       WalkSchedule, cg_l0_family, coherent_state, evolve,
                       initial_state, kernel_weights, marginal_phi,
                       phi_moment, reduce_walker, sigma_from_marginal,
                       tv_distance, wigner_at, wigner_grid)


def _evolved(sites, two_j, steps):
    idx = SiteIndexing(sites)
    spin = SpinQuantum(two_j)
    sched = WalkSchedule.site_aligned(idx, steps)
    return idx, spin, evolve(initial_state(idx, spin), CoinPulse.hadamard(),
                             sched)


# ---------------------------------------------------------------------------
# kernel weights
# ---------------------------------------------------------------------------

def test_kernel_weights_spin_half_closed_form():
    w = kernel_weights(SpinQuantum(1))
    assert w.delta[0] == pytest.approx((1.0 + math.sqrt(3.0)) / 2.0,
                                       abs=1e-12)
    assert w.delta[1] == pytest.approx((1.0 - math.sqrt(3.0)) / 2.0,
                                       abs=1e-12)


@pytest.mark.parametrize("two_j", [1, 2, 3, 8, 41, 100, 200])
def test_kernel_weights_sum_to_one(two_j):
    w = kernel_weights(SpinQuantum(two_j))
    assert math.fsum(w.delta) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("two_j,two_m", [(1, 1), (4, 2), (9, 5), (20, 14)])
def test_projection_flip_alternates_coupling_signs(two_j, two_m):
    # c_l(j, -m) = (-1)^l c_l(j, m); the kernel weights are therefore NOT
    # symmetric under m -> -m (only the even-l couplings survive unchanged)
    plus = cg_l0_family(two_j, two_m)
    minus = cg_l0_family(two_j, -two_m)
    signs = np.where(np.arange(two_j + 1) % 2 == 0, 1.0, -1.0)
    assert np.abs(minus - signs * plus).max() < 1e-11


# ---------------------------------------------------------------------------
# pointwise Wigner values
# ---------------------------------------------------------------------------

def test_maximally_mixed_state_is_flat():
    spin = SpinQuantum(10)
    rho = DensityMatrix(spin, np.eye(spin.dim, dtype=complex) / spin.dim)
    w = kernel_weights(spin)
    rng = np.random.default_rng(3)
    for _ in range(5):
        theta = rng.uniform(0.0, math.pi)
        phi = rng.uniform(-math.pi, math.pi)
        assert wigner_at(rho, theta, phi, w) \
            == pytest.approx(1.0 / spin.dim, abs=1e-12)


@pytest.mark.parametrize("two_j", [1, 10])
def test_top_dicke_state_peaks_at_north_pole(two_j):
    spin = SpinQuantum(two_j)
    rho = np.zeros((spin.dim, spin.dim), dtype=complex)
    rho[0, 0] = 1.0
    w = kernel_weights(spin)
    # at the north pole the rotated frame is the Dicke basis itself,
    # so W(0, .) is exactly the top kernel weight
    assert wigner_at(DensityMatrix(spin, rho), 0.0, 0.3, w) \
        == pytest.approx(w.delta[0], abs=1e-12)


def test_wigner_at_rejects_mismatched_weights():
    spin = SpinQuantum(4)
    rho = DensityMatrix(spin, np.eye(5, dtype=complex) / 5.0)
    with pytest.raises(ValueError):
        wigner_at(rho, 1.0, 0.0, kernel_weights(SpinQuantum(6)))


def test_wigner_at_flags_non_hermitian_input():
    spin = SpinQuantum(2)
    bad = np.zeros((3, 3), dtype=complex)
    bad[0, 0] = 1.0
    bad[0, 2] = 0.5
    with pytest.raises(NumericalInvariantError):
        wigner_at(DensityMatrix(spin, bad), 1.1, 0.4,
                  kernel_weights(spin))


# ---------------------------------------------------------------------------
# Wigner grids
# ---------------------------------------------------------------------------

def test_grid_normalization_along_the_walk():
    _, spin, states = _evolved(6, 50, 2)
    for state in states:
        grid = wigner_grid(state, (52, 48))
        assert grid.normalization() == pytest.approx(1.0, abs=1e-10)


def test_pure_state_path_matches_density_path():
    _, spin, states = _evolved(6, 30, 2)
    res = (32, 48)
    direct = wigner_grid(states[2], res)
    via_rho = wigner_grid(reduce_walker(states[2]), res)
    assert np.abs(direct.values - via_rho.values).max() < 1e-10


def test_grid_of_maximally_mixed_state_is_constant():
    spin = SpinQuantum(10)
    rho = DensityMatrix(spin, np.eye(spin.dim, dtype=complex) / spin.dim)
    grid = wigner_grid(rho, (12, 24))
    assert np.abs(grid.values - 1.0 / spin.dim).max() < 1e-12


def test_rotational_covariance_shifts_phi_columns():
    # rotating the state by one site spacing cycles the phi columns
    idx, spin, states = _evolved(6, 30, 2)
    n_phi = 48                       # multiple of 6 sites
    from blochwalk import rz_phases, CoinWalkerState
    fwd = rz_phases(spin, idx.delta_phi)
    rotated = CoinWalkerState(spin, fwd * states[2].up, fwd * states[2].down)
    base = wigner_grid(states[2], (32, n_phi))
    moved = wigner_grid(rotated, (32, n_phi))
    shift = n_phi // 6
    assert np.abs(moved.values - np.roll(base.values, shift, axis=1)).max() \
        < 1e-8


def test_interference_fringes_are_negative():
    _, spin, states = _evolved(6, 50, 2)
    grid = wigner_grid(states[2], (52, 48))
    assert grid.values.min() < -0.01


def test_mixing_lowers_the_peak():
    _, spin, states = _evolved(6, 50, 1)
    pure = wigner_grid(states[0], (52, 48)).values.max()
    mixed = wigner_grid(states[1], (52, 48)).values.max()
    assert pure > mixed


def test_grid_warns_when_resolution_too_low():
    _, spin, states = _evolved(6, 100, 0)
    with pytest.warns(UserWarning, match="normalization"):
        wigner_grid(states[0], (102, 6))


def test_grid_input_validation():
    _, spin, states = _evolved(6, 10, 0)
    with pytest.raises(ValueError):
        wigner_grid(states[0], (1, 8))
    with pytest.raises(ValueError):
        wigner_grid(states[0], (12, 24), kernel_weights(SpinQuantum(4)))
    with pytest.raises(TypeError):
        wigner_grid(np.eye(11), (12, 24))


# ---------------------------------------------------------------------------
# azimuthal marginal, site bins, moments
# ---------------------------------------------------------------------------

def test_initial_state_mass_sits_in_home_bin():
    idx, spin, states = _evolved(6, 50, 0)
    dist = marginal_phi(wigner_grid(states[0], (52, 48)), idx)
    total = dist.density.sum() * dist.phi_spacing
    assert total == pytest.approx(1.0, abs=1e-8)
    assert dist.site_probabilities[idx.site_numbers == 0][0] > 0.99


def test_uniform_state_gives_flat_marginal():
    spin = SpinQuantum(10)
    idx = SiteIndexing(6)
    rho = DensityMatrix(spin, np.eye(spin.dim, dtype=complex) / spin.dim)
    dist = marginal_phi(wigner_grid(rho, (12, 24)), idx)
    assert np.abs(dist.density - 1.0 / (2.0 * math.pi)).max() < 1e-12
    assert np.abs(dist.site_probabilities - 1.0 / 6.0).max() < 1e-12


def test_one_step_splits_half_half():
    idx, spin, states = _evolved(6, 50, 1)
    dist = marginal_phi(wigner_grid(states[1], (52, 48)), idx)
    p = {int(n): pr for n, pr in zip(dist.site_numbers,
                                     dist.site_probabilities)}
    assert p[1] == pytest.approx(0.5, abs=0.01)
    assert p[-1] == pytest.approx(0.5, abs=0.01)
    rest = sum(pr for n, pr in p.items() if n not in (1, -1))
    assert rest < 1e-3


def test_initial_packet_width_scales_as_inverse_sqrt_spins():
    for two_j in (50, 200):
        idx, spin, states = _evolved(6, two_j, 0)
        grid = wigner_grid(states[0], (two_j + 2, 240))
        sigma = sigma_from_marginal(marginal_phi(grid, idx))
        assert sigma == pytest.approx(1.0 / math.sqrt(two_j), rel=0.03)


def test_symmetric_distribution_has_zero_mean():
    idx, spin, states = _evolved(6, 50, 1)
    dist = marginal_phi(wigner_grid(states[1], (52, 48)), idx)
    assert phi_moment(dist, 1) == pytest.approx(0.0, abs=1e-8)
    assert phi_moment(dist, 1, use_site_bins=True) \
        == pytest.approx(0.0, abs=1e-8)


def test_site_binned_sigma_agrees_with_density_sigma():
    idx, spin, states = _evolved(6, 200, 1)
    dist = marginal_phi(wigner_grid(states[1], (202, 240)), idx)
    dense = sigma_from_marginal(dist)
    binned = sigma_from_marginal(dist, use_site_bins=True)
    assert binned == pytest.approx(idx.delta_phi, abs=1e-3)
    assert abs(dense - binned) < 0.05 * dense


def test_sigma_rejects_unnormalized_marginal():
    nodes = -math.pi + 2.0 * math.pi * np.arange(24) / 24.0
    dist = PhiDistribution(nodes, np.full(24, 0.01), np.arange(-2, 4),
                           np.full(6, 0.01))
    with pytest.raises(ValueError):
        sigma_from_marginal(dist)


def test_tv_distance_basics():
    assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert tv_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)
    assert tv_distance([0.7, 0.3], [0.4, 0.6]) == pytest.approx(0.3)
