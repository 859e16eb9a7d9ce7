"""Parameter studies built on the walk core.

Covers flux-ratio sweeps of any diagnostic, single-walk time series,
Gaussian smoothing of noisy series, power-law fits of the spreading
variance, continued-fraction approximants of a flux ratio, and the
dependence of the long-run coin-position entanglement on the initial
coin state.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (BlochAngles, FluxRatio, SYMMETRIC_COIN, WalkerState,
                   evolve, new_state)
from .observables import ObservableSeries, measure

_METRIC_INDEX = {name: i for i, name in enumerate(ObservableSeries.FIELDS)}


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Observable values on a flux-ratio grid, one row per step count.

    ``values[j, i]`` is the observable after ``step_counts[j]`` steps at
    ``alphas[i]``; rows are individually rescaled to a maximum of 1 when
    ``normalized`` is set.
    """

    alphas: tuple[FluxRatio, ...]
    step_counts: tuple[int, ...]
    values: np.ndarray
    observable: str
    normalized: bool

    def alpha_values(self) -> np.ndarray:
        return np.array([a.value for a in self.alphas])

    def row(self, step_count: int) -> np.ndarray:
        return self.values[self.step_counts.index(step_count)]


@dataclass(frozen=True)
class Convergent:
    """Continued-fraction approximant p/q of a flux ratio, with its error."""

    p: int
    q: int
    err: float


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares slope of log(variance) against log(step)."""

    exponent: float
    window: tuple[int, int]
    residual: float


def time_series(alpha, init: BlochAngles = SYMMETRIC_COIN, t_max: int = 100,
                half_width: int | None = None) -> ObservableSeries:
    """Run one walk and record all four diagnostics at every step 0..t_max."""
    if not isinstance(t_max, (int, np.integer)) or t_max < 1:
        raise ValueError(f"t_max must be a positive integer, got {t_max!r}")
    state = new_state(init, half_width if half_width is not None else int(t_max), alpha)
    rows = [measure(state)]
    steps = [0]

    def record(s: WalkerState) -> None:
        rows.append(measure(s))
        steps.append(s.step)

    evolve(state, int(t_max), record)
    data = np.asarray(rows)
    return ObservableSeries(steps=np.asarray(steps), variance=data[:, 0],
                            origin_region_prob=data[:, 1],
                            participation_ratio=data[:, 2],
                            entanglement_entropy=data[:, 3])


def _sweep_job(args) -> tuple[float, ...]:
    alpha, step_counts, metric, theta, phi = args
    wanted = set(step_counts)
    state = new_state(BlochAngles(theta, phi), max(step_counts), alpha)
    got = {}

    def record(s: WalkerState) -> None:
        if s.step in wanted:
            got[s.step] = measure(s)[metric]

    evolve(state, max(step_counts), record)
    return tuple(got[t] for t in step_counts)


def sweep_alpha(alphas, step_counts, observable: str = "variance",
                init: BlochAngles = SYMMETRIC_COIN, *, normalize: bool = False,
                workers: int = 1) -> SweepResult:
    """Run an independent walk for every flux ratio on a grid.

    Parameters
    ----------
    alphas:
        Flux ratios (FluxRatio values, floats, Fractions or strings); the
        result is sorted by value.
    step_counts:
        Positive step counts at which the observable is recorded.  A single
        walk per flux ratio serves every requested count, which gives the
        same values as separate runs because the evolution is deterministic.
    observable:
        One of 'variance', 'origin_region_prob', 'participation_ratio',
        'entanglement_entropy'.
    normalize:
        Rescale each step-count row by its maximum.
    workers:
        Grid points are independent; with workers > 1 they run in a process
        pool.  Results land in preallocated slots by grid index, so the
        output is bit-identical for any worker count.
    """
    ratios = sorted((FluxRatio.coerce(a) for a in alphas), key=lambda r: r.value)
    counts = tuple(int(t) for t in step_counts)
    if not ratios or not counts:
        raise ValueError("sweep needs at least one flux ratio and one step count")
    if min(counts) < 1:
        raise ValueError("step counts must be positive")
    if observable not in _METRIC_INDEX:
        raise ValueError(f"unknown observable {observable!r}; "
                         f"choose from {sorted(_METRIC_INDEX)}")
    if not isinstance(workers, (int, np.integer)) or workers < 1:
        raise ValueError(f"workers must be a positive integer, got {workers!r}")
    metric = _METRIC_INDEX[observable]
    jobs = [(a, counts, metric, init.theta, init.phi) for a in ratios]
    if workers == 1:
        rows = [_sweep_job(job) for job in jobs]
    else:
        chunk = max(1, len(jobs) // (int(workers) * 8))
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            rows = list(pool.map(_sweep_job, jobs, chunksize=chunk))
    values = np.asarray(rows, dtype=float).T.copy()
    if normalize:
        for row in values:
            peak = row.max()
            if peak > 0.0:
                row /= peak
    return SweepResult(alphas=tuple(ratios), step_counts=counts, values=values,
                       observable=observable, normalized=bool(normalize))


def peak_alpha(alphas, values, rel_tol: float = 1e-9) -> float:
    """Flux ratio of the maximum of a sweep row, given ascending alphas.

    Values within ``rel_tol`` (relative) of the maximum count as ties and
    the smallest flux ratio wins, so exactly periodic twin peaks resolve
    deterministically instead of by rounding noise.
    """
    a = np.asarray(alphas, dtype=float)
    v = np.asarray(values, dtype=float)
    if a.size == 0 or a.shape != v.shape:
        raise ValueError("alphas and values must be equal-length non-empty arrays")
    top = v.max()
    return float(a[v >= top - abs(top) * rel_tol][0])


def gaussian_smooth(series, sigma: float) -> np.ndarray:
    """Convolve with a normalized Gaussian kernel truncated at 3 sigma.

    Edge samples are renormalized over the part of the kernel that fits, so
    a constant series stays constant and the output has the input's length.
    A sigma below a third of the sample spacing leaves the series unchanged
    (the truncated kernel degenerates to a point).
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("series must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    if not (isinstance(sigma, (int, float, np.floating)) and math.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be a positive finite number, got {sigma!r}")
    radius = int(math.floor(3.0 * sigma))
    if radius == 0:
        return x.copy()
    offsets = np.arange(-radius, radius + 1, dtype=float)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel /= kernel.sum()
    smoothed = np.convolve(x, kernel, mode="full")[radius:radius + x.size]
    coverage = np.convolve(np.ones_like(x), kernel, mode="full")[radius:radius + x.size]
    return smoothed / coverage


def convergents(x, depth: int) -> list[Convergent]:
    """Continued-fraction approximants p_i/q_i of x in (0, 1).

    Each entry is the best rational approximation among all fractions with a
    denominator up to q_i, and the error decreases strictly along the list.
    Stops early when the expansion terminates at machine precision, in which
    case the last entry reproduces x exactly.
    """
    if isinstance(x, FluxRatio):
        x = x.value
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must lie strictly inside (0, 1), got {x!r}")
    if not isinstance(depth, (int, np.integer)) or depth < 1:
        raise ValueError(f"depth must be a positive integer, got {depth!r}")
    out = [Convergent(0, 1, x)]
    p, q = 0, 1
    p_prev, q_prev = 1, 0
    frac = x
    for _ in range(int(depth) - 1):
        inv = 1.0 / frac
        a = int(math.floor(inv))
        frac = inv - a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append(Convergent(p, q, abs(p / q - x)))
        if frac < 1e-12:
            break
    return out


def scaling_fit(series: ObservableSeries, window: tuple[int, int]) -> ScalingFit:
    """Fit variance ~ t**exponent over the step window by least squares in
    log-log space; the residual is the RMS log-space deviation."""
    t_lo, t_hi = int(window[0]), int(window[1])
    if t_lo > t_hi:
        raise ValueError(f"empty window {window!r}")
    mask = (series.steps >= t_lo) & (series.steps <= t_hi)
    if int(mask.sum()) < 10:
        raise ValueError("scaling fit needs at least 10 points inside the window")
    var = series.variance[mask]
    steps = series.steps[mask].astype(float)
    if np.any(var <= 0.0) or np.any(steps <= 0.0):
        raise ValueError("window contains zero variance or step 0; shrink it")
    log_t = np.log(steps)
    log_v = np.log(var)
    slope, intercept = np.polyfit(log_t, log_v, 1)
    resid = log_v - (slope * log_t + intercept)
    return ScalingFit(exponent=float(slope), window=(t_lo, t_hi),
                      residual=float(np.sqrt(np.mean(resid ** 2))))


def _basis_state(coin_index: int, half_width: int, alpha) -> WalkerState:
    size = 2 * half_width + 1
    amps = np.zeros((2, size, size), dtype=np.complex128)
    amps[coin_index, half_width, half_width] = 1.0
    return WalkerState.from_amplitudes(amps, alpha)


def _coin_blocks(a: WalkerState, b: WalkerState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    fa = np.stack([a._window(0), a._window(1)]).reshape(2, -1)
    fb = np.stack([b._window(0), b._window(1)]).reshape(2, -1)
    return fa @ fa.conj().T, fb @ fb.conj().T, fa @ fb.conj().T


def entanglement_surface(theta_grid, phi_grid, alpha, t_max: int = 500,
                         avg_window: int = 50) -> np.ndarray:
    """Long-run coin-position entanglement for a grid of initial coin states.

    For each (theta, phi) the reported value is the mean entropy over the
    final ``avg_window`` steps of a ``t_max``-step walk, the operational
    stand-in for the asymptotic value.

    The walk is linear in the initial coin state, so the two coin-basis
    walks determine every grid point exactly: per tail step the 2x2 auto-
    and cross-blocks of the basis states are recorded once, and each grid
    point reduces to a closed-form 2x2 eigenvalue problem.  This matches
    running one walk per grid point to rounding error at a tiny fraction
    of the cost.
    """
    thetas = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    phis = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    if thetas.size == 0 or phis.size == 0:
        raise ValueError("theta and phi grids must be non-empty")
    if np.any(thetas < 0.0) or np.any(thetas > math.pi):
        raise ValueError("theta grid must lie within [0, pi]")
    if np.any(phis < 0.0) or np.any(phis >= 2.0 * math.pi):
        raise ValueError("phi grid must lie within [0, 2*pi)")
    if not isinstance(t_max, (int, np.integer)) or t_max < 1:
        raise ValueError(f"t_max must be a positive integer, got {t_max!r}")
    if not isinstance(avg_window, (int, np.integer)) or not 1 <= avg_window <= t_max:
        raise ValueError("avg_window must satisfy 1 <= avg_window <= t_max")

    walk0 = _basis_state(0, int(t_max), alpha)
    walk1 = _basis_state(1, int(t_max), alpha)
    tail = []
    for t in range(1, int(t_max) + 1):
        evolve(walk0, 1)
        evolve(walk1, 1)
        if t > t_max - avg_window:
            tail.append(_coin_blocks(walk0, walk1))
    m00 = np.stack([blk[0] for blk in tail])
    m11 = np.stack([blk[1] for blk in tail])
    cross = np.stack([blk[2] for blk in tail])

    surface = np.empty((thetas.size, phis.size))
    for i, theta in enumerate(thetas):
        u = math.cos(theta / 2.0)
        s = math.sin(theta / 2.0)
        for j, phi in enumerate(phis):
            v = complex(math.cos(phi), math.sin(phi)) * s
            uv = u * v.conjugate()
            r00 = (u * u) * m00[:, 0, 0].real + abs(v) ** 2 * m11[:, 0, 0].real \
                + 2.0 * (uv * cross[:, 0, 0]).real
            r11 = (u * u) * m00[:, 1, 1].real + abs(v) ** 2 * m11[:, 1, 1].real \
                + 2.0 * (uv * cross[:, 1, 1]).real
            r01 = (u * u) * m00[:, 0, 1] + abs(v) ** 2 * m11[:, 0, 1] \
                + uv * cross[:, 0, 1] + np.conj(uv * cross[:, 1, 0])
            disc = np.sqrt(0.25 * (r00 - r11) ** 2 + np.abs(r01) ** 2)
            half_trace = 0.5 * (r00 + r11)
            lam = np.clip(np.stack([half_trace + disc, half_trace - disc]), 0.0, 1.0)
            ent = np.zeros_like(lam)
            occupied = lam > 0.0
            ent[occupied] = -lam[occupied] * np.log2(lam[occupied])
            surface[i, j] = float(ent.sum(axis=0).mean())
    return surface
