"""One period of the coin-conditioned walk U(T) = M * C on the composite
coin (x) walker system, plus the ideal orthogonal-state walk used as the
reference.

The composite state is stored as two walker branches (coin up / coin down);
both the coin flip and the conditional shift act blockwise, so a step is a
2x2 mix plus two diagonal phase scalings, O(2J+1) total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coherent import DickeVector, SiteIndexing, site_state
from .su2 import SpinQuantum, rz_phases

__all__ = [
    "CoinWalkerState",
    "CoinPulse",
    "WalkSchedule",
    "DensityMatrix",
    "coin_unitary",
    "conditional_shift",
    "step",
    "evolve",
    "reduce_walker",
    "initial_state",
    "ideal_walk",
    "ideal_sigma",
    "aligned_site_state",
    "step1_reference",
    "step2_reference",
]


@dataclass(frozen=True)
class CoinWalkerState:
    """Pure state of coin (x) walker: up/down walker branches over m = J..-J."""

    spin: SpinQuantum
    up: np.ndarray = field(repr=False)
    down: np.ndarray = field(repr=False)

    @property
    def norm(self) -> float:
        return math.sqrt(float(np.vdot(self.up, self.up).real
                               + np.vdot(self.down, self.down).real))


@dataclass(frozen=True)
class CoinPulse:
    """Coin pulse vector h; the coin flip is exp(-i h . sigma / 2)."""

    h: tuple[float, float, float]

    @classmethod
    def hadamard(cls) -> "CoinPulse":
        """h = (pi, 0, pi)/sqrt(2), realizing -i H_c."""
        a = math.pi / math.sqrt(2.0)
        return cls((a, 0.0, a))


@dataclass(frozen=True)
class WalkSchedule:
    """Per-step rotation angle kappa*T and step count on a given site ring."""

    kappa_T: float
    steps: int
    indexing: SiteIndexing

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")

    @classmethod
    def site_aligned(cls, indexing: SiteIndexing, steps: int) -> "WalkSchedule":
        """kappa*T = delta_phi = 2 pi / L: one site per step."""
        return cls(indexing.delta_phi, steps, indexing)


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced walker state over the Dicke basis."""

    spin: SpinQuantum
    entries: np.ndarray = field(repr=False)

    def validate(self, eig_tol: float = 1e-10) -> None:
        h_err = np.abs(self.entries - self.entries.conj().T).max()
        if h_err > 1e-12:
            raise ValueError(f"density matrix not Hermitian ({h_err:.2e})")
        tr_err = abs(self.entries.trace() - 1.0)
        if tr_err > 1e-10:
            raise ValueError(f"density matrix trace off by {tr_err:.2e}")
        lo = np.linalg.eigvalsh(self.entries).min()
        if lo < -eig_tol:
            raise ValueError(f"density matrix has eigenvalue {lo:.2e}")

    def purity(self) -> float:
        return float(np.vdot(self.entries, self.entries).real)


def coin_unitary(pulse: CoinPulse) -> np.ndarray:
    """exp(-i h.sigma/2) = cos(h/2) I - i sin(h/2) (h/|h|).sigma."""
    hx, hy, hz = pulse.h
    h = math.sqrt(hx * hx + hy * hy + hz * hz)
    if h == 0.0:
        return np.eye(2, dtype=complex)
    c = math.cos(h / 2.0)
    s = math.sin(h / 2.0) / h
    return np.array([
        [c - 1j * s * hz, -s * hy - 1j * s * hx],
        [s * hy - 1j * s * hx, c + 1j * s * hz],
    ])


def initial_state(indexing: SiteIndexing, spin: SpinQuantum, site: int = 0,
                  coin: tuple[complex, complex] = (1.0, 0.0)) -> CoinWalkerState:
    """|phi_site> (x) (coin_up, coin_down); defaults to |phi_0> (x) |up>."""
    w = site_state(indexing, spin, site).amplitudes
    cu, cd = coin
    scale = math.sqrt(abs(cu) ** 2 + abs(cd) ** 2)
    return CoinWalkerState(spin, (cu / scale) * w, (cd / scale) * w)


def conditional_shift(state: CoinWalkerState,
                      schedule: WalkSchedule) -> CoinWalkerState:
    """M: R_z(+kappa T) on the up branch, R_z(-kappa T) on the down branch."""
    fwd = rz_phases(state.spin, schedule.kappa_T)
    return CoinWalkerState(state.spin, fwd * state.up,
                           fwd.conj() * state.down)


def step(state: CoinWalkerState, pulse: CoinPulse,
         schedule: WalkSchedule) -> CoinWalkerState:
    """One period U(T) = M * C: coin flip first, then conditional shift."""
    u = coin_unitary(pulse)
    mixed = CoinWalkerState(
        state.spin,
        u[0, 0] * state.up + u[0, 1] * state.down,
        u[1, 0] * state.up + u[1, 1] * state.down,
    )
    return conditional_shift(mixed, schedule)


def evolve(initial: CoinWalkerState, pulse: CoinPulse,
           schedule: WalkSchedule) -> list[CoinWalkerState]:
    """States after 0 .. schedule.steps applications of U(T)."""
    states = [initial]
    for _ in range(schedule.steps):
        states.append(step(states[-1], pulse, schedule))
    return states


def reduce_walker(state: CoinWalkerState) -> DensityMatrix:
    """Trace out the coin: rho_w = |up><up| + |down><down|."""
    rho = np.outer(state.up, state.up.conj()) + np.outer(state.down,
                                                         state.down.conj())
    return DensityMatrix(state.spin, rho)


# ---------------------------------------------------------------------------
# Ideal orthogonal-state walk on the cyclic lattice
# ---------------------------------------------------------------------------

def ideal_walk(sites: int, steps: int, coin: np.ndarray,
               start_site: int = 0,
               coin_state: tuple[complex, complex] = (1.0, 0.0)
               ) -> list[np.ndarray]:
    """Exact unitary walk with orthogonal site states.

    Returns one probability array per step (0..steps), each over the
    balanced site range of SiteIndexing(sites).site_numbers (ascending).
    """
    if sites < 2:
        raise ValueError(f"need at least 2 sites, got {sites}")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    indexing = SiteIndexing(sites)
    amp = np.zeros((sites, 2), dtype=complex)   # indexed by site mod L
    cu, cd = coin_state
    scale = math.sqrt(abs(cu) ** 2 + abs(cd) ** 2)
    amp[start_site % sites] = (cu / scale, cd / scale)

    order = indexing.site_numbers % sites       # balanced order -> mod-L rows
    probs = [(np.abs(amp[order]) ** 2).sum(axis=1)]
    for _ in range(steps):
        amp = amp @ coin.T
        up = np.roll(amp[:, 0], 1)      # coin-up moves +1 site
        down = np.roll(amp[:, 1], -1)   # coin-down moves -1 site
        amp = np.stack([up, down], axis=1)
        probs.append((np.abs(amp[order]) ** 2).sum(axis=1))
    return probs


def ideal_sigma(probabilities: np.ndarray, indexing: SiteIndexing) -> float:
    """sqrt(<phi^2> - <phi>^2) over unwrapped phi_n = n * delta_phi."""
    p = np.asarray(probabilities, dtype=float)
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    phi = indexing.site_numbers * indexing.delta_phi
    mean = float(p @ phi)
    second = float(p @ (phi * phi))
    return math.sqrt(max(0.0, second - mean * mean))


# ---------------------------------------------------------------------------
# Closed-form references for the first two Hadamard steps
# ---------------------------------------------------------------------------

def aligned_site_state(indexing: SiteIndexing, spin: SpinQuantum,
                       n: int) -> DickeVector:
    """Site state in the rotation-aligned gauge R_z(n dphi)|phi_0>.

    Differs from site_state by the global phase e^{-i J n dphi}; this is the
    gauge in which the conditional shift maps site n to site n+1 with no
    extra phase, and in which the two-step closed form below holds exactly.
    """
    base = site_state(indexing, spin, n)
    phase = np.exp(-1j * spin.j * n * indexing.delta_phi)
    return DickeVector(spin, phase * base.amplitudes)


def step1_reference(indexing: SiteIndexing, spin: SpinQuantum) -> DensityMatrix:
    """rho_w after one Hadamard step: (|phi_1><phi_1| + |phi_-1><phi_-1|)/2."""
    p1 = site_state(indexing, spin, 1).amplitudes
    m1 = site_state(indexing, spin, -1).amplitudes
    rho = 0.5 * (np.outer(p1, p1.conj()) + np.outer(m1, m1.conj()))
    return DensityMatrix(spin, rho)


def step2_reference(indexing: SiteIndexing, spin: SpinQuantum) -> DensityMatrix:
    """rho_w after two Hadamard steps:
    (|phi_2>+|phi_0>)(<phi_2|+<phi_0|)/4 + (|phi_0>-|phi_-2>)(h.c.)/4,
    with the sites taken in the rotation-aligned gauge."""
    a2 = aligned_site_state(indexing, spin, 2).amplitudes
    a0 = aligned_site_state(indexing, spin, 0).amplitudes
    am2 = aligned_site_state(indexing, spin, -2).amplitudes
    plus = a2 + a0
    minus = a0 - am2
    rho = 0.25 * (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj()))
    return DensityMatrix(spin, rho)
