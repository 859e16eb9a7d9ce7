"""Discrete-time quantum walk on a square lattice with tunable hop phases.

A two-level coin drives nearest-neighbour hops.  One step applies the
Hadamard coin, shifts along x, applies the coin again and shifts along y.
Hops along y pick up the unit-modulus factor exp(+-i 2 pi alpha n), where
n is the column index and alpha the magnetic flux per plaquette in units
of the flux quantum (Landau gauge: x-hops stay phase-free).  Amplitudes
live on a dense complex grid preallocated for the requested maximum number
of steps; reaching the lattice edge is a hard error, never a wraparound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import _kernels

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class BoundaryOverflowError(RuntimeError):
    """Raised when a shift would push amplitude past the lattice edge."""


@dataclass(frozen=True, eq=True)
class FluxRatio:
    """Magnetic flux through one plaquette over the flux quantum, mod 1.

    Rational ratios keep exact integers (numerator, denominator) so hop
    phases can be evaluated as exact roots of unity; irrational ratios
    carry only a float value and an optional label.
    """

    value: float
    numerator: int | None = None
    denominator: int | None = None
    label: str | None = None

    def __post_init__(self):
        if not math.isfinite(self.value) or not 0.0 <= self.value < 1.0:
            raise ValueError(f"flux ratio value must lie in [0, 1), got {self.value!r}")
        if (self.numerator is None) != (self.denominator is None):
            raise ValueError("numerator and denominator must be given together")
        if self.denominator is not None:
            p, q = self.numerator, self.denominator
            if q < 1 or not 0 <= p < q or math.gcd(p, q) != 1:
                raise ValueError(f"rational flux ratio {p}/{q} is not reduced into [0, 1)")
            if self.value != p / q:
                raise ValueError("stored value disagrees with numerator/denominator")

    @property
    def is_rational(self) -> bool:
        return self.denominator is not None

    @classmethod
    def rational(cls, p: int, q: int, label: str | None = None) -> "FluxRatio":
        """Exact rational ratio p/q, reduced modulo 1."""
        if q == 0:
            raise ValueError("flux ratio denominator must be nonzero")
        f = Fraction(p, q) % 1
        return cls(value=f.numerator / f.denominator, numerator=f.numerator,
                   denominator=f.denominator, label=label)

    @classmethod
    def irrational(cls, value: float, label: str | None = None) -> "FluxRatio":
        """Ratio given only as a real number, reduced modulo 1."""
        if not math.isfinite(value):
            raise ValueError(f"flux ratio must be finite, got {value!r}")
        return cls(value=value % 1.0, label=label)

    @classmethod
    def from_float(cls, x: float) -> "FluxRatio":
        """Exact rational ratio equal to the binary float x, modulo 1."""
        if not math.isfinite(x):
            raise ValueError(f"flux ratio must be finite, got {x!r}")
        f = Fraction(x) % 1
        return cls(value=f.numerator / f.denominator, numerator=f.numerator,
                   denominator=f.denominator)

    @classmethod
    def parse(cls, text: str) -> "FluxRatio":
        """Parse 'p/q', a decimal literal, or a named constant ('golden').

        Decimal text is kept exact as a rational, so '0.5' means 1/2; named
        constants are the only inputs treated as irrational.
        """
        key = text.strip().lower()
        if key in NAMED_FLUX_RATIOS:
            return NAMED_FLUX_RATIOS[key]
        try:
            f = Fraction(key) % 1
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse flux ratio from {text!r}") from None
        return cls(value=f.numerator / f.denominator, numerator=f.numerator,
                   denominator=f.denominator)

    @classmethod
    def coerce(cls, value) -> "FluxRatio":
        """Accept a FluxRatio, Fraction, int, float, or string."""
        if isinstance(value, cls):
            return value
        if isinstance(value, Fraction):
            return cls.rational(value.numerator, value.denominator)
        if isinstance(value, (int, np.integer)):
            return cls.rational(int(value), 1)
        if isinstance(value, (float, np.floating)):
            return cls.from_float(float(value))
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot interpret {value!r} as a flux ratio")

    def __str__(self) -> str:
        if self.label:
            return self.label
        if self.is_rational:
            return f"{self.numerator}/{self.denominator}"
        return repr(self.value)


GOLDEN_RATIO = FluxRatio.irrational((math.sqrt(5.0) - 1.0) / 2.0, label="golden")

NAMED_FLUX_RATIOS = {"golden": GOLDEN_RATIO}


@dataclass(frozen=True)
class BlochAngles:
    """Initial two-level coin state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("coin angles must be finite")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi!r}")

    def coin_amplitudes(self) -> tuple[complex, complex]:
        return (complex(math.cos(self.theta / 2.0)),
                complex(math.cos(self.phi), math.sin(self.phi)) * math.sin(self.theta / 2.0))


SYMMETRIC_COIN = BlochAngles(math.pi / 2.0, math.pi / 2.0)


def _phase_values(alpha: FluxRatio, n_lo: int, n_hi: int) -> np.ndarray:
    """Unit factors exp(+i 2 pi alpha n) for integer columns n_lo..n_hi.

    Rational ratios go through the exact residue (p*n) mod q, so the entries
    are q-th roots of unity with no phase accumulation error; other ratios
    reduce alpha*n modulo 1 before the complex exponential.
    """
    ns = range(n_lo, n_hi + 1)
    if alpha.is_rational:
        p, q = alpha.numerator, alpha.denominator
        frac = np.array([((p * n) % q) / q for n in ns])
    else:
        frac = np.array([math.fmod(alpha.value * n, 1.0) for n in ns])
    return np.exp(2j * np.pi * frac)


@dataclass(frozen=True, eq=False)
class PhaseTable:
    """Per-column hop factors exp(+i 2 pi alpha n) for n in [-T, T].

    Coin-0 hops (m -> m-1) multiply by the tabulated entry; coin-1 hops
    (m -> m+1) use its conjugate.
    """

    alpha: FluxRatio
    half_width: int
    values: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, alpha: FluxRatio, half_width: int) -> "PhaseTable":
        alpha = FluxRatio.coerce(alpha)
        if half_width < 1:
            raise ValueError("half_width must be a positive integer")
        return cls(alpha=alpha, half_width=half_width,
                   values=_phase_values(alpha, -half_width, half_width))

    def phase(self, n: int) -> complex:
        if abs(n) > self.half_width:
            raise IndexError(f"column {n} outside [-{self.half_width}, {self.half_width}]")
        return complex(self.values[n + self.half_width])


class WalkerState:
    """Full quantum state of the walker: complex amplitudes over coin x lattice.

    The lattice spans n, m in [-T, T] for half-width T, stored as a dense
    (2, 2T+3, 2T+3) complex grid whose outer one-cell ring is permanently
    zero padding.  ``step`` counts applied walk steps; evolution never
    renormalizes, so norm drift is a correctness signal rather than noise.
    """

    __slots__ = ("half_width", "step", "alpha", "_grid", "_back", "_center",
                 "_bounds", "_phases")

    def __init__(self, coin: BlochAngles, half_width: int, alpha):
        if not isinstance(coin, BlochAngles):
            coin = BlochAngles(*coin)
        if not isinstance(half_width, (int, np.integer)) or half_width < 1:
            raise ValueError(f"half_width must be a positive integer, got {half_width!r}")
        self.half_width = int(half_width)
        self.step = 0
        self.alpha = FluxRatio.coerce(alpha)
        size = 2 * self.half_width + 3
        self._center = self.half_width + 1
        self._grid = np.zeros((2, size, size), dtype=np.complex128)
        self._back = np.zeros((2, size, size), dtype=np.complex128)
        a0, a1 = coin.coin_amplitudes()
        self._grid[0, self._center, self._center] = a0
        self._grid[1, self._center, self._center] = a1
        self._bounds = (0, 0, 0, 0)
        self._phases = _phase_values(self.alpha, -self._center, self._center)

    @classmethod
    def from_amplitudes(cls, amps, alpha, step: int = 0, check: bool = True) -> "WalkerState":
        """Build a state from a (2, 2T+1, 2T+1) amplitude array.

        With ``check`` on, requires unit total probability (within 1e-9) and
        support confined to the radius set by ``step``.
        """
        amps = np.asarray(amps, dtype=np.complex128)
        if amps.ndim != 3 or amps.shape[0] != 2 or amps.shape[1] != amps.shape[2] \
                or amps.shape[1] % 2 == 0 or amps.shape[1] < 3:
            raise ValueError("amplitudes must have shape (2, 2T+1, 2T+1) with T >= 1")
        half_width = (amps.shape[1] - 1) // 2
        if not isinstance(step, (int, np.integer)) or step < 0:
            raise ValueError(f"step must be a non-negative integer, got {step!r}")
        nz = np.nonzero(np.abs(amps).sum(axis=0))
        if nz[0].size == 0:
            raise ValueError("state has no amplitude")
        n_lo = int(nz[0].min()) - half_width
        n_hi = int(nz[0].max()) - half_width
        m_lo = int(nz[1].min()) - half_width
        m_hi = int(nz[1].max()) - half_width
        if check:
            total = float(np.sum(np.abs(amps) ** 2))
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"total probability is {total!r}, expected 1 within 1e-9")
            radius = min(int(step), half_width)
            if max(abs(n_lo), abs(n_hi), abs(m_lo), abs(m_hi)) > radius:
                raise ValueError(f"support exceeds |n|,|m| <= {radius} allowed after {step} steps")
        obj = cls.__new__(cls)
        obj.half_width = half_width
        obj.step = int(step)
        obj.alpha = FluxRatio.coerce(alpha)
        size = 2 * half_width + 3
        obj._center = half_width + 1
        obj._grid = np.zeros((2, size, size), dtype=np.complex128)
        obj._back = np.zeros((2, size, size), dtype=np.complex128)
        obj._grid[:, 1:-1, 1:-1] = amps
        obj._bounds = (n_lo, n_hi, m_lo, m_hi)
        obj._phases = _phase_values(obj.alpha, -obj._center, obj._center)
        return obj

    def copy(self) -> "WalkerState":
        obj = type(self).__new__(type(self))
        obj.half_width = self.half_width
        obj.step = self.step
        obj.alpha = self.alpha
        obj._center = self._center
        obj._grid = self._grid.copy()
        obj._back = np.zeros_like(self._back)
        obj._bounds = self._bounds
        obj._phases = self._phases
        return obj

    @property
    def amplitudes(self) -> np.ndarray:
        """Read-only (2, 2T+1, 2T+1) view; index [coin, n+T, m+T]."""
        view = self._grid[:, 1:-1, 1:-1]
        view.flags.writeable = False
        return view

    @property
    def support_bounds(self) -> tuple[int, int, int, int]:
        """Inclusive (n_lo, n_hi, m_lo, m_hi) box that contains all amplitude."""
        return self._bounds

    def amplitude(self, coin: int, n: int, m: int) -> complex:
        if coin not in (0, 1):
            raise ValueError("coin must be 0 or 1")
        if abs(n) > self.half_width or abs(m) > self.half_width:
            return 0.0j
        return complex(self._grid[coin, self._center + n, self._center + m])

    def probability(self, n: int, m: int) -> float:
        """Site probability summed over the coin, zero outside the lattice."""
        if abs(n) > self.half_width or abs(m) > self.half_width:
            return 0.0
        a0 = self._grid[0, self._center + n, self._center + m]
        a1 = self._grid[1, self._center + n, self._center + m]
        return float((a0.real ** 2 + a0.imag ** 2) + (a1.real ** 2 + a1.imag ** 2))

    def squared_norm(self) -> float:
        """Total probability; stays within 1e-9 of 1 under evolution."""
        n_lo, n_hi, m_lo, m_hi = self._bounds
        c = self._center
        w = self._grid[:, c + n_lo:c + n_hi + 1, c + m_lo:c + m_hi + 1]
        return float(np.sum(w.real ** 2 + w.imag ** 2))

    def phase_table(self) -> PhaseTable:
        """Hop-phase table for this state's flux ratio and lattice."""
        c = self._center
        return PhaseTable(alpha=self.alpha, half_width=self.half_width,
                          values=self._phases[1:2 * c])

    def _window(self, coin: int) -> np.ndarray:
        n_lo, n_hi, m_lo, m_hi = self._bounds
        c = self._center
        return self._grid[coin, c + n_lo:c + n_hi + 1, c + m_lo:c + m_hi + 1]


def new_state(coin: BlochAngles, half_width: int, alpha) -> WalkerState:
    """Walker at the origin with the given coin state and flux ratio."""
    return WalkerState(coin, half_width, alpha)


def _edge_check(state: WalkerState, axis: int) -> None:
    # Hard boundary policy: refuse to shift while any amplitude sits on the
    # lattice edge of the shifted axis.
    T = state.half_width
    c = state._center
    n_lo, n_hi, m_lo, m_hi = state._bounds
    if axis == 0:
        edges = [e for e in (n_lo, n_hi) if abs(e) == T]
        occupied = any(np.any(state._grid[:, c + e, c + m_lo:c + m_hi + 1]) for e in edges)
    else:
        edges = [e for e in (m_lo, m_hi) if abs(e) == T]
        occupied = any(np.any(state._grid[:, c + n_lo:c + n_hi + 1, c + e]) for e in edges)
    if occupied:
        name = "nm"[axis]
        raise BoundaryOverflowError(
            f"step {state.step}: amplitude at the lattice edge |{name}| = {T}; "
            f"enlarge half_width instead of wrapping around")


def apply_coin(state: WalkerState) -> WalkerState:
    """Hadamard on the coin at every site, in place: (a0, a1) ->
    ((a0+a1)/sqrt(2), (a0-a1)/sqrt(2))."""
    w0 = state._window(0)
    w1 = state._window(1)
    s = (w0 + w1) * _INV_SQRT2
    d = (w0 - w1) * _INV_SQRT2
    w0[...] = s
    w1[...] = d
    return state


def shift_x(state: WalkerState) -> WalkerState:
    """Move coin-0 amplitude to n-1 and coin-1 amplitude to n+1, in place."""
    _edge_check(state, axis=0)
    c = state._center
    T = state.half_width
    n_lo, n_hi, m_lo, m_hi = state._bounds
    ms = slice(c + m_lo, c + m_hi + 1)
    g0, g1 = state._grid[0], state._grid[1]
    g0[c + n_lo - 1:c + n_hi, ms] = g0[c + n_lo:c + n_hi + 1, ms]
    g0[c + n_hi, ms] = 0.0
    g1[c + n_lo + 1:c + n_hi + 2, ms] = g1[c + n_lo:c + n_hi + 1, ms]
    g1[c + n_lo, ms] = 0.0
    state._bounds = (max(n_lo - 1, -T), min(n_hi + 1, T), m_lo, m_hi)
    return state


def shift_y(state: WalkerState, phases: PhaseTable | None = None) -> WalkerState:
    """Move coin-0 amplitude to m-1 times exp(+i 2 pi alpha n), coin-1 to
    m+1 times the conjugate factor, in place.

    ``phases`` defaults to the state's own table; passing one allows a walk
    to be driven with substitute hop factors.
    """
    _edge_check(state, axis=1)
    c = state._center
    T = state.half_width
    n_lo, n_hi, m_lo, m_hi = state._bounds
    rows = slice(c + n_lo, c + n_hi + 1)
    if phases is None:
        col = state._phases[rows]
    else:
        if phases.half_width < max(abs(n_lo), abs(n_hi)):
            raise ValueError("phase table does not cover the occupied columns")
        off = phases.half_width
        col = phases.values[n_lo + off:n_hi + 1 + off]
    col = col[:, None]
    g0, g1 = state._grid[0], state._grid[1]
    g0[rows, c + m_lo - 1:c + m_hi] = g0[rows, c + m_lo:c + m_hi + 1] * col
    g0[rows, c + m_hi] = 0.0
    g1[rows, c + m_lo + 1:c + m_hi + 2] = g1[rows, c + m_lo:c + m_hi + 1] * col.conj()
    g1[rows, c + m_lo] = 0.0
    state._bounds = (n_lo, n_hi, max(m_lo - 1, -T), min(m_hi + 1, T))
    return state


def step(state: WalkerState) -> WalkerState:
    """Advance one walk step: coin, x-shift, coin, y-shift, then t -> t+1.

    Runs as a single fused stencil into the back buffer and swaps buffers,
    which matches the composed sub-operations to rounding error while doing
    one pass over the occupied window.
    """
    T = state.half_width
    if state.step >= T:
        raise BoundaryOverflowError(
            f"step {state.step}: lattice half-width {T} exhausted; allocate a larger grid")
    _edge_check(state, axis=0)
    _edge_check(state, axis=1)
    c = state._center
    n_lo, n_hi, m_lo, m_hi = state._bounds
    bounds = (max(n_lo - 1, -T), min(n_hi + 1, T), max(m_lo - 1, -T), min(m_hi + 1, T))
    _kernels.step_window(state._grid[0], state._grid[1],
                         state._back[0], state._back[1], state._phases,
                         c + bounds[0], c + bounds[1], c + bounds[2], c + bounds[3])
    state._grid, state._back = state._back, state._grid
    state._bounds = bounds
    state.step += 1
    return state


def evolve(state: WalkerState, steps: int,
           hook: Callable[[WalkerState], None] | None = None) -> WalkerState:
    """Apply ``steps`` walk steps, calling ``hook(state)`` after each one.

    The hook sees a consistent post-step snapshot and must treat it as
    read-only.  Refuses runs that would overrun the preallocated grid.
    """
    if not isinstance(steps, (int, np.integer)) or steps < 0:
        raise ValueError(f"steps must be a non-negative integer, got {steps!r}")
    if state.step + steps > state.half_width:
        raise ValueError(
            f"evolving {steps} steps from t={state.step} would exceed the grid "
            f"half-width {state.half_width}")
    for _ in range(int(steps)):
        step(state)
        if hook is not None:
            hook(state)
    return state
