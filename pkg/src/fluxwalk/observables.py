"""Diagnostics derived from a walker state.

Everything here is a pure read-only function of its input: site probability
maps, the spreading variance (second moment about the origin), the
probability of sitting near the origin, the participation ratio, and the
coin-position entanglement entropy of the position-traced coin matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import WalkerState

_ORIGIN_REGION = [(n, m) for n in (-2, 0, 2) for m in (-2, 0, 2)]


@dataclass(frozen=True, eq=False)
class ProbabilityMap:
    """Site probabilities over the state's occupied box at a given step.

    ``probs[i, j]`` is the probability at site (n_lo + i, m_lo + j); sites
    outside the box are implicitly zero.
    """

    probs: np.ndarray = field(repr=False)
    n_lo: int
    m_lo: int
    step: int

    def at(self, n: int, m: int) -> float:
        i = n - self.n_lo
        j = m - self.m_lo
        if 0 <= i < self.probs.shape[0] and 0 <= j < self.probs.shape[1]:
            return float(self.probs[i, j])
        return 0.0

    def total(self) -> float:
        return float(self.probs.sum())


@dataclass(frozen=True, eq=False)
class CoinDensity:
    """Position-traced 2x2 coin matrix: rho[c, c'] = sum_nm a_c conj(a_c')."""

    matrix: np.ndarray = field(repr=False)

    def eigenvalues(self) -> tuple[float, float]:
        """Closed-form eigenvalues, clamped into [0, 1], largest first."""
        r00 = float(self.matrix[0, 0].real)
        r11 = float(self.matrix[1, 1].real)
        half_trace = 0.5 * (r00 + r11)
        disc = math.sqrt(0.25 * (r00 - r11) ** 2 + abs(self.matrix[0, 1]) ** 2)
        hi = min(max(half_trace + disc, 0.0), 1.0)
        lo = min(max(half_trace - disc, 0.0), 1.0)
        return hi, lo


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Step-indexed record of the four walk diagnostics."""

    steps: np.ndarray
    variance: np.ndarray
    origin_region_prob: np.ndarray
    participation_ratio: np.ndarray
    entanglement_entropy: np.ndarray

    FIELDS = ("variance", "origin_region_prob", "participation_ratio",
              "entanglement_entropy")

    def __post_init__(self):
        lengths = {len(self.steps), len(self.variance), len(self.origin_region_prob),
                   len(self.participation_ratio), len(self.entanglement_entropy)}
        if lengths != {len(self.steps)}:
            raise ValueError("all series columns must have equal length")
        if len(self.steps) and np.any(np.diff(self.steps) <= 0):
            raise ValueError("steps must be strictly increasing")
        for name in self.FIELDS:
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite values")
        if np.any(self.entanglement_entropy < -1e-12) \
                or np.any(self.entanglement_entropy > 1.0 + 1e-12):
            raise ValueError("entanglement entropy outside [0, 1]")
        if np.any(self.participation_ratio < 1.0 - 1e-9):
            raise ValueError("participation ratio below 1")

    def __len__(self) -> int:
        return len(self.steps)

    def column(self, name: str) -> np.ndarray:
        if name not in self.FIELDS:
            raise KeyError(f"unknown observable {name!r}")
        return getattr(self, name)


def probability_map(state: WalkerState) -> ProbabilityMap:
    """Sum |amplitude|^2 over the coin at every occupied site."""
    w0 = state._window(0)
    w1 = state._window(1)
    probs = (w0.real ** 2 + w0.imag ** 2) + (w1.real ** 2 + w1.imag ** 2)
    n_lo, _, m_lo, _ = state.support_bounds
    return ProbabilityMap(probs=probs, n_lo=n_lo, m_lo=m_lo, step=state.step)


def variance(pm: ProbabilityMap) -> float:
    """Spreading measure: sum of (n^2 + m^2) P(n, m), no mean subtraction."""
    rows, cols = pm.probs.shape
    n = np.arange(pm.n_lo, pm.n_lo + rows, dtype=float)
    m = np.arange(pm.m_lo, pm.m_lo + cols, dtype=float)
    weights = n[:, None] ** 2 + m[None, :] ** 2
    return float(np.sum(pm.probs * weights))


def origin_region_probability(pm: ProbabilityMap) -> float:
    """Probability summed over the nine sites with n, m in {-2, 0, 2}."""
    return float(sum(pm.at(n, m) for n, m in _ORIGIN_REGION))


def participation_ratio(pm: ProbabilityMap) -> float:
    """Effective number of occupied sites, 1 / sum of squared probabilities."""
    return float(1.0 / np.sum(pm.probs ** 2))


def coin_density(state: WalkerState) -> CoinDensity:
    """Trace out position, leaving the 2x2 coin matrix."""
    w0 = state._window(0)
    w1 = state._window(1)
    r00 = float(np.sum(w0.real ** 2 + w0.imag ** 2))
    r11 = float(np.sum(w1.real ** 2 + w1.imag ** 2))
    r01 = complex(np.sum(w0 * w1.conj()))
    return CoinDensity(matrix=np.array([[r00, r01], [r01.conjugate(), r11]],
                                       dtype=np.complex128))


def entanglement_entropy(rho: CoinDensity) -> float:
    """Base-2 von Neumann entropy of the coin matrix, in [0, 1]."""
    if not isinstance(rho, CoinDensity):
        rho = CoinDensity(matrix=np.asarray(rho, dtype=np.complex128))
    return _entropy_from_eigenvalues(*rho.eigenvalues())


def _entropy_from_eigenvalues(hi: float, lo: float) -> float:
    s = 0.0
    for lam in (hi, lo):
        if lam > 0.0:
            s -= lam * math.log2(lam)
    return s


def measure(state: WalkerState) -> tuple[float, float, float, float]:
    """Fused fast path returning (variance, origin_region_prob,
    participation_ratio, entanglement_entropy) in one pass over the state.

    Matches the per-observable functions to rounding error; used by the
    per-step collection hooks where building a probability map every step
    would dominate the run time.
    """
    n_lo, n_hi, m_lo, m_hi = state.support_bounds
    c = state._center
    m2, p2, r00, r11, r01 = _kernels.window_moments(
        state._grid[0], state._grid[1],
        c + n_lo, c + n_hi, c + m_lo, c + m_hi, c)
    origin = sum(state.probability(n, m) for n, m in _ORIGIN_REGION)
    half_trace = 0.5 * (r00 + r11)
    disc = math.sqrt(0.25 * (r00 - r11) ** 2 + abs(r01) ** 2)
    hi = min(max(half_trace + disc, 0.0), 1.0)
    lo = min(max(half_trace - disc, 0.0), 1.0)
    return m2, origin, 1.0 / p2, _entropy_from_eigenvalues(hi, lo)
