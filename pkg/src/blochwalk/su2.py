"""Core SU(2) numerics: Dicke-basis bookkeeping, Clebsch-Gordan coefficients
and Wigner rotation matrices, stable up to two_j = 200 and beyond.

All angular momenta and projections are passed as doubled integers (two_j,
two_m) so half-integer spins are exact and no floating-point comparison of
quantum numbers ever happens.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpinQuantum",
    "LogFactorialTable",
    "lnfact",
    "cg_coefficient",
    "cg_l0_family",
    "SmallDMatrix",
    "small_d_matrix",
    "rz_phases",
    "rotated_dicke_frame",
]


@dataclass(frozen=True)
class SpinQuantum:
    """Total spin J stored as the integer two_j = 2J (= N, the spin count)."""

    two_j: int

    def __post_init__(self):
        if self.two_j < 0:
            raise ValueError(f"two_j must be non-negative, got {self.two_j}")

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def m_values(self) -> np.ndarray:
        """Projections m = J, J-1, ..., -J (descending, index 0 is m = J)."""
        return (self.two_j - 2.0 * np.arange(self.dim)) / 2.0


class LogFactorialTable:
    """Cumulative table of ln(n!), grown on demand.

    Built by sequential accumulation of ln(n) so adjacent differences
    reproduce ln(n) to machine precision.
    """

    def __init__(self, n_max: int = 64):
        self.values = np.concatenate(
            ([0.0], np.cumsum(np.log(np.arange(1, n_max + 1))))
        )

    def extend(self, n_max: int) -> None:
        n0 = len(self.values) - 1
        if n_max <= n0:
            return
        tail = np.cumsum(np.log(np.arange(n0 + 1, n_max + 1))) + self.values[-1]
        self.values = np.concatenate((self.values, tail))

    def __call__(self, n):
        return self.values[n]


_lnfact_lock = threading.Lock()
_lnfact_table = LogFactorialTable(256)


def lnfact(n):
    """ln(n!) for scalar or integer-array n (shared, lock-guarded table)."""
    top = int(np.max(n))
    if top >= len(_lnfact_table.values):
        with _lnfact_lock:
            _lnfact_table.extend(max(top, 2 * len(_lnfact_table.values)))
    return _lnfact_table(n)


def _check_jm(two_j: int, two_m: int, name: str) -> None:
    if two_j < 0:
        raise ValueError(f"{name}: negative angular momentum two_j={two_j}")
    if abs(two_m) > two_j:
        raise ValueError(f"{name}: |m| > j (two_m={two_m}, two_j={two_j})")
    if (two_j + two_m) % 2:
        raise ValueError(f"{name}: j and m differ by a non-integer "
                         f"(two_j={two_j}, two_m={two_m})")


def cg_coefficient(two_j1: int, two_m1: int, two_j2: int, two_m2: int,
                   two_J: int, two_M: int) -> float:
    """Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, Condon-Shortley sign.

    Racah sum with all factorials in the log domain and compensated
    summation of the signed terms.  Returns 0 when M != m1 + m2 or the
    triangle inequality fails; raises on invalid quantum numbers.
    """
    _check_jm(two_j1, two_m1, "j1/m1")
    _check_jm(two_j2, two_m2, "j2/m2")
    _check_jm(two_J, two_M, "J/M")
    if two_M != two_m1 + two_m2:
        return 0.0
    if two_J > two_j1 + two_j2 or two_J < abs(two_j1 - two_j2):
        return 0.0
    if (two_j1 + two_j2 + two_J) % 2:
        return 0.0

    a = (two_j1 + two_j2 - two_J) // 2
    b = (two_j1 - two_j2 + two_J) // 2
    c = (-two_j1 + two_j2 + two_J) // 2
    per = (two_j1 + two_j2 + two_J) // 2 + 1
    log_pre = 0.5 * (
        math.log(two_J + 1.0)
        + lnfact(a) + lnfact(b) + lnfact(c) - lnfact(per)
        + lnfact((two_J + two_M) // 2) + lnfact((two_J - two_M) // 2)
        + lnfact((two_j1 - two_m1) // 2) + lnfact((two_j1 + two_m1) // 2)
        + lnfact((two_j2 - two_m2) // 2) + lnfact((two_j2 + two_m2) // 2)
    )

    k_min = max(0, (two_j2 - two_J - two_m1) // 2, (two_j1 + two_m2 - two_J) // 2)
    k_max = min(a, (two_j1 - two_m1) // 2, (two_j2 + two_m2) // 2)
    if k_max < k_min:
        return 0.0
    k = np.arange(k_min, k_max + 1)
    log_den = (
        lnfact(k) + lnfact(a - k)
        + lnfact((two_j1 - two_m1) // 2 - k)
        + lnfact((two_j2 + two_m2) // 2 - k)
        + lnfact((two_J - two_j2 + two_m1) // 2 + k)
        + lnfact((two_J - two_j1 - two_m2) // 2 + k)
    )
    logs = log_pre - log_den
    peak = logs.max()
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    total = math.fsum(signs * np.exp(logs - peak))
    return total * math.exp(peak)


def cg_l0_family(two_j: int, two_m: int) -> np.ndarray:
    """All coefficients <j m; l 0 | j m> for l = 0 .. 2j at once.

    Evaluated through the three-term recursion for the associated 3j symbol,
    run downward in l from the stretched (l = 2j) closed form.  Downward is
    the stable direction: the wanted solution grows toward small l, so the
    recursion stays accurate at two_j = 200 where the Racah sum loses all
    significance to cancellation.
    """
    _check_jm(two_j, two_m, "j/m")
    m = two_m / 2.0
    j = two_j / 2.0
    n = two_j + 1
    h = np.zeros(n)

    jp = (two_j + two_m) // 2
    jm = (two_j - two_m) // 2
    # stretched 3j (j j 2j; -m m 0)
    h[n - 1] = math.exp(0.5 * (4.0 * lnfact(two_j) - lnfact(2 * two_j + 1)
                               - 2.0 * lnfact(jp) - 2.0 * lnfact(jm)))
    two_j_p1 = two_j + 1.0

    def edge(l: int) -> float:
        return l * l * math.sqrt(two_j_p1 * two_j_p1 - l * l)

    if n > 1:
        l = two_j
        h[l - 1] = -(2 * l + 1) * l * (l + 1) * (2.0 * m) * h[l] / ((l + 1) * edge(l))
    for l in range(two_j - 1, 0, -1):
        h[l - 1] = (-(2 * l + 1) * l * (l + 1) * (2.0 * m) * h[l]
                    - l * edge(l + 1) * h[l + 1]) / ((l + 1) * edge(l))

    ls = np.arange(n)
    s_jm = -1.0 if jp % 2 else 1.0
    signs = np.where(ls % 2 == 0, 1.0, -1.0) * s_jm
    coeffs = signs * math.sqrt(two_j + 1.0) * h
    # self-check: l = 0 coupling is the identity
    if abs(coeffs[0] - 1.0) > 1e-9:
        raise ArithmeticError(
            f"CG recursion lost accuracy at two_j={two_j}, two_m={two_m}: "
            f"c_0 = {coeffs[0]!r}")
    return coeffs


# ---------------------------------------------------------------------------
# Wigner small-d rotation matrices
# ---------------------------------------------------------------------------

_jy_lock = threading.Lock()
_jy_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _jy_eigensystem(two_j: int):
    """Eigenvectors of J_y in the Dicke basis; eigenvalues snapped to the
    exact m grid.  Cached per two_j (read-only after construction)."""
    with _jy_lock:
        hit = _jy_cache.get(two_j)
    if hit is not None:
        return hit
    dim = two_j + 1
    m = (two_j - 2.0 * np.arange(dim)) / 2.0
    j = two_j / 2.0
    raise_amp = np.sqrt(j * (j + 1.0) - m[1:] * (m[1:] + 1.0))
    jplus = np.zeros((dim, dim), dtype=complex)
    jplus[np.arange(dim - 1), np.arange(1, dim)] = raise_amp
    jy = (jplus - jplus.conj().T) / 2.0j
    eigvals, eigvecs = np.linalg.eigh(jy)
    eigvals = np.round(2.0 * eigvals) / 2.0
    entry = (eigvals, eigvecs)
    with _jy_lock:
        _jy_cache[two_j] = entry
    return entry


@dataclass(frozen=True)
class SmallDMatrix:
    """Real rotation matrix d^j_{m',m}(beta) = <j m'| exp(-i beta J_y) |j m>,
    rows and columns both ordered m = J .. -J."""

    two_j: int
    beta: float
    entries: np.ndarray = field(repr=False)

    def __matmul__(self, other):
        if isinstance(other, SmallDMatrix):
            return self.entries @ other.entries
        return self.entries @ other


def small_d_matrix(spin: SpinQuantum, beta: float) -> SmallDMatrix:
    """d^j(beta) via the eigendecomposition of J_y.

    Overflow-free and accurate to ~1e-13 per entry for two_j <= 200; the
    direct Wigner sum formula cancels catastrophically there.
    """
    if beta == 0.0:
        return SmallDMatrix(spin.two_j, 0.0, np.eye(spin.dim))
    eigvals, eigvecs = _jy_eigensystem(spin.two_j)
    phases = np.exp(-1j * beta * eigvals)
    entries = ((eigvecs * phases) @ eigvecs.conj().T).real
    return SmallDMatrix(spin.two_j, float(beta), entries)


def rz_phases(spin: SpinQuantum, alpha: float) -> np.ndarray:
    """Diagonal of R_z(alpha) = exp(-i alpha J_z): e^{-i alpha m}, m = J..-J."""
    return np.exp(-1j * alpha * spin.m_values)


def rotated_dicke_frame(spin: SpinQuantum, theta: float, phi: float) -> np.ndarray:
    """Unitary whose column m is the rotated Dicke state |j,m;d> with
    d = (sin t cos p, sin t sin p, cos t): U = diag(e^{-i phi m}) d^j(theta).
    """
    d = small_d_matrix(spin, theta)
    return rz_phases(spin, phi)[:, None] * d.entries
