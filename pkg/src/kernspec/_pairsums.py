"""Compiled O(n^2) pair loops shared by the test statistic and the
path-functional estimators.

All accumulations use Kahan compensation in a fixed order (inner index
ascending, outer index ascending), so results are bit-identical across
runs and independent of any outer parallelism.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@njit(cache=True, inline="always")
def _kern(z, code):
    if code == 0:  # gaussian
        return math.exp(-0.5 * z * z) / _SQRT_2PI
    if code == 1:  # epanechnikov
        if abs(z) <= 1.0:
            return 0.75 * (1.0 - z * z)
        return 0.0
    # uniform on [-1/2, 1/2]
    if abs(z) <= 0.5:
        return 1.0
    return 0.0


@njit(cache=True)
def pair_stats(u, x, h, code):
    """Off-diagonal pair sums of the statistic and its self-normalizer.

    Returns (sum_{s != t} u_t u_s K, sum_{s != t} u_t^2 u_s^2 K^2),
    evaluated as twice the upper triangle by kernel symmetry.
    """
    n = u.shape[0]
    acc_s = 0.0
    comp_s = 0.0
    acc_v = 0.0
    comp_v = 0.0
    for t in range(1, n):
        for s in range(t):
            w = _kern((x[t] - x[s]) / h, code)
            if w == 0.0:
                continue
            term = u[t] * u[s] * w
            yy = term - comp_s
            tt = acc_s + yy
            comp_s = (tt - acc_s) - yy
            acc_s = tt
            term2 = (u[t] * u[t]) * (u[s] * u[s]) * (w * w)
            yy = term2 - comp_v
            tt = acc_v + yy
            comp_v = (tt - acc_v) - yy
            acc_v = tt
    return 2.0 * acc_s, 2.0 * acc_v


@njit(cache=True)
def weighted_error_sums(u, x, h, code):
    """Running kernel-weighted error sums: out[t] = sum_{s < t} u_s K[(x_t - x_s)/h]."""
    n = u.shape[0]
    out = np.zeros(n)
    for t in range(1, n):
        acc = 0.0
        comp = 0.0
        for s in range(t):
            w = _kern((x[t] - x[s]) / h, code)
            term = u[s] * w
            yy = term - comp
            tt = acc + yy
            comp = (tt - acc) - yy
            acc = tt
        out[t] = acc
    return out


@njit(cache=True)
def cross_pair_sum(a, b, x, h, code):
    """sum_{s != t} a_s b_t K[(x_t - x_s)/h] over all ordered pairs."""
    n = a.shape[0]
    acc = 0.0
    comp = 0.0
    for t in range(1, n):
        for s in range(t):
            w = _kern((x[t] - x[s]) / h, code)
            if w == 0.0:
                continue
            term = (a[s] * b[t] + a[t] * b[s]) * w
            yy = term - comp
            tt = acc + yy
            comp = (tt - acc) - yy
            acc = tt
    return acc


@njit(cache=True)
def gaussian_pair_prefix(xnorm, scale):
    """Prefix sums of the pair functional with a standard-normal-shaped weight.

    out[k-1] = sum_{i,j <= k} exp(-(scale (x_i - x_j))^2 / 2) for
    k = 1..n, diagonal included (each diagonal term equals 1).
    """
    n = xnorm.shape[0]
    out = np.empty(n)
    acc = 1.0
    comp = 0.0
    out[0] = acc
    for k in range(1, n):
        row = 0.0
        rcomp = 0.0
        for j in range(k):
            d = scale * (xnorm[k] - xnorm[j])
            term = math.exp(-0.5 * d * d)
            yy = term - rcomp
            tt = row + yy
            rcomp = (tt - row) - yy
            row = tt
        term = 2.0 * row + 1.0
        yy = term - comp
        tt = acc + yy
        comp = (tt - acc) - yy
        acc = tt
        out[k] = acc
    return out


@njit(cache=True)
def pair_average_full(a, b):
    """Full double sum sum_{i,j} exp(-(a_i - b_j)^2 / 2) over two grids."""
    n = a.shape[0]
    m = b.shape[0]
    acc = 0.0
    comp = 0.0
    for i in range(n):
        for j in range(m):
            d = a[i] - b[j]
            term = math.exp(-0.5 * d * d)
            yy = term - comp
            tt = acc + yy
            comp = (tt - acc) - yy
            acc = tt
    return acc
