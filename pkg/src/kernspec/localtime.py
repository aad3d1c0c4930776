"""The Gaussian limit process, self-intersection local time, and the
path functionals that converge to it.

The limit process solves dG = kappa G dt + dW from G(0) = 0; it is
simulated on a uniform grid with the exact one-step transition, so the
only approximation anywhere in this module is the spatial window or
histogram used by the estimators.

The self-intersection local time of a path over [0, r] at spatial
offset ``u`` is estimated by the pair-window count

    (1 / 2 eps) * dt^2 * #{(i, j) : |G(t_i) - G(t_j) - u| < eps},

with the diagonal i = j included, matching the unrestricted double sums
of the limit functionals (the regression test statistic, by contrast,
excludes its diagonal; the two conventions are deliberate and
documented side by side here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.signal import lfilter

from . import _pairsums
from .dgp import EtaSpec, RegressorSpec, build_eta, build_regressor, long_run_phi, warmup_length
from .errors import InvalidSpecError
from .kernels import adaptive_simpson
from .rng import as_generator
from .validation import check_positive, check_series


@dataclass(frozen=True)
class GaussPath:
    """A discretized limit-process path on the uniform grid i/m, i = 0..m."""

    m: int
    kappa: float
    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        if len(self.values) != self.m + 1:
            raise InvalidSpecError(f"values must hold m+1={self.m + 1} grid points")

    @property
    def dt(self) -> float:
        return 1.0 / self.m


@dataclass(frozen=True)
class LocalTimeEstimate:
    value: float
    r: float
    u: float
    epsilon: float
    m: int


@dataclass(frozen=True)
class FunctionalConfig:
    """Weight function, scale sequence value and integral for the pair functional.

    ``omega`` is the integral of ``g`` over the line; when omitted it is
    computed by adaptive quadrature over [-40, 40], which covers every
    built-in weight.  The coupled-convergence check requires a nonzero
    ``omega``.
    """

    g: Callable
    c_n: float
    omega: float | None = None

    def __post_init__(self):
        check_positive(self.c_n, "c_n")

    def integral(self) -> float:
        if self.omega is not None:
            return float(self.omega)
        return adaptive_simpson(lambda t: float(self.g(np.float64(t))), -40.0, 40.0, tol=1e-10)


def gaussian_bump(x):
    """exp(-x^2 / 2); integral sqrt(2 pi)."""
    return np.exp(-0.5 * np.square(x))


def cosine_weight(x):
    """cos(x); bounded and smooth but not integrable."""
    return np.cos(x)


def simulate_gauss_path(kappa: float, m: int, seed) -> GaussPath:
    """Simulate the limit process with the exact one-step transition.

    Over a step of length dt the process satisfies
    G(t + dt) = e^{kappa dt} G(t) + xi with
    xi ~ N(0, (e^{2 kappa dt} - 1) / (2 kappa)) (variance dt when
    kappa = 0), so there is no discretization bias at the grid points.
    """
    m = int(m)
    if m < 2:
        raise InvalidSpecError(f"grid size m must be at least 2, got {m}")
    if not np.isfinite(kappa):
        raise InvalidSpecError("kappa must be finite")
    rng = as_generator(seed)
    dt = 1.0 / m
    decay = math.exp(kappa * dt)
    if kappa == 0.0:
        step_var = dt
    else:
        step_var = (math.exp(2.0 * kappa * dt) - 1.0) / (2.0 * kappa)
    shocks = math.sqrt(step_var) * rng.standard_normal(m)
    increments_path = lfilter([1.0], [1.0, -decay], shocks)
    values = np.concatenate([[0.0], increments_path])
    return GaussPath(
        m=m,
        kappa=float(kappa),
        values=values,
        seed=seed if isinstance(seed, (int, np.integer)) else None,
    )


def default_window(values, m: int) -> float:
    """Spatial window for the pair count: m**(-1/4) times the value spread.

    Shrinks with the grid but much slower than the grid spacing, so each
    window keeps many grid pairs.  Exposed as a parameter everywhere it
    is used; the demo command reports sensitivity to half and double.
    """
    spread = float(np.std(values))
    if spread == 0.0:
        spread = 1.0
    return float(m) ** -0.25 * spread


def _window_pair_count(vals: np.ndarray, u: float, eps: float) -> int:
    """#{(i, j) : |v_i - v_j - u| < eps} over all ordered pairs, diagonal included."""
    srt = np.sort(vals)
    upper = np.searchsorted(srt, vals - u + eps, side="left")
    lower = np.searchsorted(srt, vals - u - eps, side="right")
    return int(np.sum(upper - lower))


def intersection_local_time(path: GaussPath, r: float, u: float, epsilon: float) -> LocalTimeEstimate:
    """Window estimate of the self-intersection local time over [0, r] at offset u.

    Uses the grid points t_1 .. t_{floor(r m)}; for u = 0 the diagonal
    contributes dt^2 floor(r m) / (2 eps), a vanishing but included
    mass.
    """
    if not 0.0 < r <= 1.0:
        raise InvalidSpecError(f"r must lie in (0, 1], got {r}")
    check_positive(epsilon, "epsilon")
    k = int(math.floor(r * path.m + 1e-9))
    if k < 1:
        value = 0.0
    else:
        pts = path.values[1 : k + 1]
        count = _window_pair_count(pts, u, epsilon)
        value = path.dt**2 * count / (2.0 * epsilon)
    return LocalTimeEstimate(value=value, r=float(r), u=float(u), epsilon=float(epsilon), m=path.m)


def occupation_density(path: GaussPath, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Histogram estimate of the occupation density over the path range.

    Returns (bin centers, time spent per unit of space).
    """
    bins = int(bins)
    if bins < 10:
        raise InvalidSpecError(f"need at least 10 bins, got {bins}")
    pts = path.values[1:]
    lo, hi = float(np.min(pts)), float(np.max(pts))
    if hi <= lo:
        hi = lo + 1.0
    counts, edges = np.histogram(pts, bins=bins, range=(lo, hi))
    width = edges[1] - edges[0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    density = path.dt * counts / width
    return centers, density


def occupation_identity(path: GaussPath, bins: int, epsilon: float) -> tuple[float, float]:
    """Two routes to the self-intersection time at offset zero.

    The direct route is the pair-window estimate; the indirect route
    integrates the squared occupation density, using the identity that
    the self-intersection time equals the integral of the squared
    occupation density over space.
    """
    direct = intersection_local_time(path, 1.0, 0.0, epsilon).value
    _, density = occupation_density(path, bins)
    pts = path.values[1:]
    width = (float(np.max(pts)) - float(np.min(pts))) / bins
    if width <= 0.0:
        width = 1.0 / bins
    via_density = float(np.sum(density**2) * width)
    return direct, via_density


def pair_functional(x_norm, config: FunctionalConfig, r: float) -> float:
    """The scaled pair sum (c_n / n^2) sum_{k,j <= floor(n r)} g[c_n (x_k - x_j)].

    The diagonal k = j is included, so a single retained observation
    contributes (c_n / n^2) g(0).
    """
    x_norm = check_series(x_norm, "x_norm")
    if not 0.0 < r <= 1.0:
        raise InvalidSpecError(f"r must lie in (0, 1], got {r}")
    n = len(x_norm)
    k = int(math.floor(n * r + 1e-9))
    if k < 1:
        return 0.0
    prefix = _pair_prefix(x_norm[:k], config.c_n, config.g)
    return config.c_n / n**2 * prefix[k - 1]


def _pair_prefix(vals: np.ndarray, scale: float, g) -> np.ndarray:
    """Prefix sums P_k = sum_{i,j <= k} g[scale (v_i - v_j)], k = 1..len(vals)."""
    if g is gaussian_bump:
        return _pairsums.gaussian_pair_prefix(vals, scale)
    n = len(vals)
    g0 = float(np.asarray(g(np.float64(0.0))))
    out = np.empty(n)
    acc = g0
    out[0] = acc
    for k in range(1, n):
        row = float(np.sum(g(scale * (vals[k] - vals[:k]))))
        acc += 2.0 * row + g0
        out[k] = acc
    return out


def _pair_mean(a: np.ndarray, b: np.ndarray, g) -> float:
    """Mean of g(a_i - b_j) over the full rectangle of pairs."""
    if g is gaussian_bump:
        total = _pairsums.pair_average_full(a, b)
        return total / (len(a) * len(b))
    total = 0.0
    for i in range(len(a)):
        total += float(np.sum(g(a[i] - b)))
    return total / (len(a) * len(b))


def coupled_paths(eps_stream, n: int, kappa: float, eta_spec: EtaSpec):
    """Build the normalized data path and its coupled limit path.

    ``eps_stream`` is either an integer seed or an explicit array of
    warmup_length(eta_spec) + n innovations, whose leading block feeds
    the error-process warm-up.  The same main innovations drive both
    the near-integrated recursion (through eta) and, via their scaled
    partial sums, the limit path, so the two are pathwise coupled.

    Returns (x_norm, limit path values on the grid k/n, k = 0..n).
    """
    n = int(n)
    need = warmup_length(eta_spec)
    if isinstance(eps_stream, (int, np.integer)):
        rng = as_generator(int(eps_stream))
        stream = rng.standard_normal(need + n)
    else:
        stream = check_series(eps_stream, "eps_stream", min_len=need + n)
        if len(stream) != need + n:
            raise InvalidSpecError(
                f"eps_stream must hold warmup+n = {need + n} draws, got {len(stream)}"
            )
    warm, main = stream[:need], stream[need:]
    eta = build_eta(main, eta_spec, warm=warm)
    y = build_regressor(eta, RegressorSpec(n=n, kappa=kappa))
    phi = long_run_phi(eta_spec)
    x_norm = y / (math.sqrt(n) * phi)

    # limit path from the same partial sums: one-step exact decay on the
    # Brownian increments eps_k / sqrt(n)
    decay = math.exp(kappa / n)
    g1 = lfilter([1.0], [1.0, -decay], main / math.sqrt(n))
    g1 = np.concatenate([[0.0], g1])
    return x_norm, g1


def coupled_sup_discrepancy(
    eps_stream,
    n: int,
    kappa: float,
    eta_spec: EtaSpec,
    config: FunctionalConfig,
    grid_r=None,
    window: float | None = None,
) -> float:
    """Sup over a time grid of |pair functional - omega * local-time estimate|.

    Both objects are built from the same innovations (see
    :func:`coupled_paths`), so the gap measures how closely the scaled
    pair sum tracks the weighted self-intersection time of its own
    limit path.  ``window`` defaults to :func:`default_window` on the
    limit path.
    """
    omega = config.integral()
    if omega == 0.0:
        raise InvalidSpecError("the weight integral omega must be nonzero")
    if grid_r is None:
        grid_r = np.linspace(0.05, 1.0, 20)
    grid_r = np.asarray(grid_r, dtype=np.float64)
    if np.any((grid_r <= 0) | (grid_r > 1)):
        raise InvalidSpecError("grid_r entries must lie in (0, 1]")

    x_norm, g1 = coupled_paths(eps_stream, n, kappa, eta_spec)
    if window is None:
        window = default_window(g1, n)
    check_positive(window, "window")

    prefix = _pair_prefix(x_norm, config.c_n, config.g)
    worst = 0.0
    for r in grid_r:
        k = int(math.floor(n * r + 1e-9))
        if k < 1:
            continue
        s_val = config.c_n / n**2 * prefix[k - 1]
        pts = g1[1 : k + 1]
        count = _window_pair_count(pts, 0.0, window)
        lt = count / (n**2 * 2.0 * window)
        worst = max(worst, abs(s_val - omega * lt))
    return worst


def riemann_compare(eps_stream, n: int, kappa: float, eta_spec: EtaSpec, g) -> tuple[float, float]:
    """Unscaled pair average of the data versus its limit-path double integral.

    Returns (lhs, rhs) where lhs = n^{-2} sum_{k,j <= n} g(x_k - x_j)
    and rhs is the same average over the coupled limit path, i.e. a
    Riemann sum for the double integral of g over the path.  Intended
    for smooth bounded weights (gaussian bump, cosine).
    """
    x_norm, g1 = coupled_paths(eps_stream, n, kappa, eta_spec)
    lhs = _pair_mean(x_norm, x_norm, g)
    pts = g1[1:]
    rhs = _pair_mean(pts, pts, g)
    return lhs, rhs
