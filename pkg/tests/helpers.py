"""Shared construction helpers for the test suite."""

import numpy as np

from fluxwalk import WalkerState


def random_parity_state(rng, half_width, step, alpha) -> WalkerState:
    """Random normalized state obeying the walk invariants at the given step:
    support inside |n|, |m| <= min(step, half_width) and both coordinates
    congruent to step mod 2."""
    size = 2 * half_width + 1
    radius = min(step, half_width)
    amps = np.zeros((2, size, size), dtype=np.complex128)
    offsets = [k for k in range(-radius, radius + 1) if (k - step) % 2 == 0]
    for n in offsets:
        for m in offsets:
            amps[:, n + half_width, m + half_width] = (
                rng.standard_normal(2) + 1j * rng.standard_normal(2))
    amps /= np.sqrt(np.sum(np.abs(amps) ** 2))
    return WalkerState.from_amplitudes(amps, alpha, step=step)


def random_dense_state(rng, half_width, alpha, radius=None) -> WalkerState:
    """Random normalized state without parity structure, supported on
    |n|, |m| <= radius (the whole lattice by default).

    Declared at step = half_width so the support-confinement check passes.
    """
    size = 2 * half_width + 1
    if radius is None:
        radius = half_width
    amps = np.zeros((2, size, size), dtype=np.complex128)
    lo, hi = half_width - radius, half_width + radius + 1
    shape = (2, hi - lo, hi - lo)
    amps[:, lo:hi, lo:hi] = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    amps /= np.sqrt(np.sum(np.abs(amps) ** 2))
    return WalkerState.from_amplitudes(amps, alpha, step=half_width)


def single_site_state(coin, n, m, half_width, alpha, amp=1.0) -> WalkerState:
    """Unit amplitude on one (coin, n, m) cell."""
    size = 2 * half_width + 1
    amps = np.zeros((2, size, size), dtype=np.complex128)
    amps[coin, n + half_width, m + half_width] = amp
    return WalkerState.from_amplitudes(amps, alpha, step=half_width)


def inner_product(u: WalkerState, v: WalkerState) -> complex:
    return complex(np.vdot(u.amplitudes, v.amplitudes))
