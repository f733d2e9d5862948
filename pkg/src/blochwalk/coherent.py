"""Spin coherent states in the Dicke basis and their overlaps.

The walker's lattice is a ring of L equally spaced sites on a parallel of
the Bloch sphere (default: the equator), each site being the coherent state
|theta0, n * 2pi/L>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .su2 import SpinQuantum, lnfact

__all__ = [
    "DickeVector",
    "SiteIndexing",
    "coherent_state",
    "site_state",
    "overlap_modulus",
    "overlap_equator",
]


@dataclass(frozen=True)
class DickeVector:
    """Walker state: complex amplitudes over |J,m>, m = J .. -J."""

    spin: SpinQuantum
    amplitudes: np.ndarray = field(repr=False)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "DickeVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class SiteIndexing:
    """Ring of `sites` equally spaced azimuthal sites at latitude theta0."""

    sites: int
    theta0: float = math.pi / 2.0

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError(f"need at least 2 sites, got {self.sites}")

    @property
    def delta_phi(self) -> float:
        return 2.0 * math.pi / self.sites

    def wrap(self, n: int) -> int:
        """Site index wrapped into the balanced range (-L/2, L/2]."""
        r = n % self.sites
        if 2 * r > self.sites:
            r -= self.sites
        return r

    @property
    def site_numbers(self) -> np.ndarray:
        """All site indices in the balanced range, ascending."""
        lo = self.sites // 2 - self.sites + 1
        return np.arange(lo, lo + self.sites)

    def phi(self, n: int) -> float:
        return self.wrap(n) * self.delta_phi


def coherent_state(spin: SpinQuantum, theta: float, phi: float) -> DickeVector:
    """Spin coherent state |theta, phi> expanded over the Dicke basis.

    Amplitude on |J,m> is sqrt(C(2J, J-m)) cos^{J+m}(t/2) sin^{J-m}(t/2)
    e^{i(J-m)phi}; the binomial factor is evaluated in the log domain so the
    state stays unit norm at J = 100 arbitrarily close to the poles.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    tj = spin.two_j
    k = np.arange(spin.dim)          # lowering steps, k = J - m
    log_binom = 0.5 * (lnfact(tj) - lnfact(k) - lnfact(tj - k))

    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    log_c = math.log(c) if c > 0.0 else -math.inf
    log_s = math.log(s) if s > 0.0 else -math.inf
    exp_cos = tj - k                 # J + m
    exp_sin = k                      # J - m
    # 0 * log(0) counts as 0 so the pole states come out exact
    log_mag = log_binom.copy()
    with np.errstate(invalid="ignore"):
        log_mag += np.where(exp_cos > 0, exp_cos * log_c, 0.0)
        log_mag += np.where(exp_sin > 0, exp_sin * log_s, 0.0)
    amps = np.exp(log_mag) * np.exp(1j * k * phi)
    return DickeVector(spin, amps)


def site_state(indexing: SiteIndexing, spin: SpinQuantum, n: int) -> DickeVector:
    """Walker site state |phi_n> = |theta0, n * delta_phi>, n wrapped."""
    return coherent_state(spin, indexing.theta0, indexing.phi(n))


def overlap_modulus(spin: SpinQuantum, theta1: float, phi1: float,
                    theta2: float, phi2: float) -> float:
    """|<theta1,phi1|theta2,phi2>| = cos^{2J}(Theta/2) with Theta the angle
    between the two Bloch directions."""
    cos_big = (math.cos(theta1) * math.cos(theta2)
               + math.sin(theta1) * math.sin(theta2) * math.cos(phi1 - phi2))
    half = (1.0 + min(1.0, max(-1.0, cos_big))) / 2.0   # cos^2(Theta/2)
    if half <= 0.0:
        return 0.0
    if half >= 1.0:
        return 1.0
    return math.exp((spin.two_j / 2.0) * math.log(half))


def overlap_equator(m: int, n: int, indexing: SiteIndexing,
                    spin: SpinQuantum) -> float:
    """|<phi_m|phi_n>| = [(cos((m-n) dphi) + 1)/2]^J on the equator."""
    if abs(indexing.theta0 - math.pi / 2.0) > 1e-12:
        raise ValueError("equator overlap formula requires theta0 = pi/2")
    half = (math.cos((m - n) * indexing.delta_phi) + 1.0) / 2.0
    if half <= 0.0:
        return 0.0
    if half >= 1.0:
        return 1.0
    return math.exp((spin.two_j / 2.0) * math.log(half))
