"""Numba-compiled hot loops: the fused walk step and windowed reductions."""

from numba import njit


@njit(cache=True)
def step_window(a0, a1, out0, out1, phase, i_lo, i_hi, j_lo, j_hi):
    # One full walk step (coin, x-shift, coin, y-shift with column phases),
    # folded into a single diagonal stencil.  Output cell (i, j) pulls from
    # the four diagonal neighbours; the two 1/sqrt(2) coin factors combine
    # into the overall 1/2.  Reads may touch one cell beyond the window, so
    # the grids carry a permanently-zero one-cell pad ring.
    for i in range(i_lo, i_hi + 1):
        ph = phase[i]
        phc = ph.conjugate()
        for j in range(j_lo, j_hi + 1):
            s = (a0[i + 1, j + 1] + a1[i + 1, j + 1]) + (a0[i - 1, j + 1] - a1[i - 1, j + 1])
            out0[i, j] = 0.5 * ph * s
            d = (a0[i + 1, j - 1] + a1[i + 1, j - 1]) - (a0[i - 1, j - 1] - a1[i - 1, j - 1])
            out1[i, j] = 0.5 * phc * d


@njit(cache=True)
def window_moments(a0, a1, i_lo, i_hi, j_lo, j_hi, center):
    # Single pass over the occupied window:
    #   m2  - second moment of the site probabilities about the origin
    #   p2  - sum of squared site probabilities
    #   r00, r11, r01 - entries of the position-traced 2x2 coin matrix
    m2 = 0.0
    p2 = 0.0
    r00 = 0.0
    r11 = 0.0
    r01 = 0.0j
    for i in range(i_lo, i_hi + 1):
        n = i - center
        n2 = float(n * n)
        for j in range(j_lo, j_hi + 1):
            x = a0[i, j]
            y = a1[i, j]
            p0 = x.real * x.real + x.imag * x.imag
            p1 = y.real * y.real + y.imag * y.imag
            p = p0 + p1
            m = j - center
            m2 += (n2 + m * m) * p
            p2 += p * p
            r00 += p0
            r11 += p1
            r01 += x * y.conjugate()
    return m2, p2, r00, r11, r01
