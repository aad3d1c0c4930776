"""Simulated data: correlated innovations, linear-process errors, and
near-integrated regressors.

One simulated data set is a :class:`SamplePath` with the index
convention that position ``t`` (1-based) holds the regression pair
``(x_t, y_{t+1})``, so all stored series have exactly ``n`` entries:

* ``x``   : x_1 .. x_n, generated by x_t = (1 + kappa/n) x_{t-1} + eta_t
            from x_0 = 0;
* ``u``   : u_2 .. u_{n+1}, the regression errors;
* ``y``   : y_2 .. y_{n+1}, where y_{t+1} = f(x_t) + u_{t+1};
* ``eps`` : eps_1 .. eps_n, the innovations driving eta.

The innovation pairs (eps_t, u_t) are drawn i.i.d. bivariate normal
with unit variances and correlation ``r``, realized through the
Cholesky form u = r eps + sqrt(1 - r^2) xi with xi an independent
standard normal.  One extra pair supplies u_{n+1}; its eps is unused.

Stream-consumption order is frozen (see :mod:`kernspec.rng` for the
seeding recipe): first the n+1 innovation pairs (all eps draws, then
all xi draws), then any warm-up draws the error process needs (500
steps for the autoregressive mode, one pre-sample innovation for the
moving-average mode, one window of pre-sample innovations for an
explicit linear filter).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidSpecError, NonFiniteDataError
from .rng import as_generator
from .validation import check_same_length, check_series

AR_WARMUP = 500

IID = "iid"
AR = "ar"
MA = "ma"
LINEAR = "linear"


@dataclass(frozen=True)
class InnovationSpec:
    """Joint law of the innovation pair (eps_t, u_t).

    Both marginals are standard normal; ``r`` is their correlation.
    """

    r: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.r) or abs(self.r) > 1.0:
            raise InvalidSpecError(f"correlation r must lie in [-1, 1], got {self.r}")


@dataclass(frozen=True)
class EtaSpec:
    """Shape of the error process driving the regressor.

    Modes: ``iid`` (eta_t = eps_t), ``ar`` (eta_t = lam eta_{t-1} + eps_t,
    |lam| < 1), ``ma`` (eta_t = eps_t + lam eps_{t-1}) and ``linear``
    (explicit filter weights ``coeffs``; an infinite filter must be
    truncated so the discarded tail has absolute mass below 1e-12).
    """

    mode: str = IID
    lam: float = 0.0
    coeffs: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.mode not in (IID, AR, MA, LINEAR):
            raise InvalidSpecError(f"unknown eta mode {self.mode!r}")
        if not np.isfinite(self.lam):
            raise InvalidSpecError("lambda must be finite")
        if self.mode == AR and abs(self.lam) >= 1.0:
            raise InvalidSpecError(f"AR mode needs |lambda| < 1, got {self.lam}")
        if self.mode == LINEAR:
            if not self.coeffs:
                raise InvalidSpecError("linear mode needs filter coefficients")
            coeffs = np.asarray(self.coeffs, dtype=np.float64)
            if not np.isfinite(coeffs).all():
                raise InvalidSpecError("filter coefficients must be finite")
            if abs(coeffs.sum()) == 0.0:
                raise InvalidSpecError("filter coefficients must not sum to zero")
        elif self.coeffs is not None:
            raise InvalidSpecError("coeffs is only meaningful in linear mode")


@dataclass(frozen=True)
class RegressorSpec:
    """Near-integrated recursion x_t = rho x_{t-1} + eta_t, rho = 1 + kappa/n."""

    n: int
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.n) < 2:
            raise InvalidSpecError(f"sample size must be at least 2, got {self.n}")
        if not np.isfinite(self.kappa):
            raise InvalidSpecError("kappa must be finite")

    @property
    def rho(self) -> float:
        return 1.0 + self.kappa / self.n


@dataclass(frozen=True)
class SamplePath:
    """One aligned simulated (or ingested) data set; see module docstring."""

    n: int
    x: np.ndarray
    u: np.ndarray
    y: np.ndarray
    eps: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        for name in ("x", "u", "y", "eps"):
            if len(getattr(self, name)) != self.n:
                raise InvalidSpecError(f"{name} must have length n={self.n}")


def draw_innovations(n: int, spec: InnovationSpec, seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` i.i.d. innovation pairs; returns (eps, u).

    ``seed`` may be an integer or a ``numpy.random.Generator``.  The
    stream consumption order (n eps draws, then n xi draws) is frozen.
    """
    n = int(n)
    if n < 1:
        raise InvalidSpecError(f"need n >= 1 innovation pairs, got {n}")
    rng = as_generator(seed)
    eps = rng.standard_normal(n)
    xi = rng.standard_normal(n)
    u = spec.r * eps + np.sqrt(1.0 - spec.r**2) * xi
    return eps, u


def warmup_length(spec: EtaSpec) -> int:
    """Number of auxiliary innovations the error process consumes."""
    if spec.mode == IID:
        return 0
    if spec.mode == AR:
        return AR_WARMUP
    if spec.mode == MA:
        return 1
    return len(spec.coeffs) - 1


def build_eta(
    eps,
    spec: EtaSpec,
    rng: np.random.Generator | None = None,
    warm=None,
) -> np.ndarray:
    """Filter innovations into the error series eta, honoring the warm-up rules.

    AR mode runs the recursion from eta = 0 through ``AR_WARMUP``
    auxiliary innovations before the returned range; MA and linear
    modes use pre-sample innovations.  The auxiliary draws come from
    ``warm`` when given (an explicit block of length
    ``warmup_length(spec)``), otherwise from ``rng``, which is then
    mandatory for every mode except ``iid``.
    """
    eps = check_series(eps, "eps")
    if spec.mode == IID:
        return eps.copy()
    need = warmup_length(spec)
    if warm is None:
        if rng is None:
            raise InvalidSpecError(
                f"eta mode {spec.mode!r} needs a generator or an explicit warm-up block"
            )
        warm = rng.standard_normal(need)
    warm = np.asarray(warm, dtype=np.float64)
    if len(warm) != need:
        raise InvalidSpecError(f"warm-up block must have length {need}, got {len(warm)}")
    if spec.mode == AR:
        full = np.concatenate([warm, eps])
        eta = lfilter([1.0], [1.0, -spec.lam], full)
        return eta[need:]
    if spec.mode == MA:
        lagged = np.concatenate([warm, eps[:-1]])
        return eps + spec.lam * lagged
    # linear: eta_t = sum_k coeffs[k] * eps_{t-k}; the warm-up block holds
    # the len(coeffs)-1 pre-sample innovations
    coeffs = np.asarray(spec.coeffs, dtype=np.float64)
    full = np.concatenate([warm, eps])
    eta = np.convolve(full, coeffs, mode="full")[need : need + len(eps)]
    return eta


def build_regressor(eta, spec: RegressorSpec) -> np.ndarray:
    """Run the near-integrated recursion from x_0 = 0."""
    eta = check_series(eta, "eta")
    if len(eta) != spec.n:
        raise InvalidSpecError(f"eta has length {len(eta)}, spec says n={spec.n}")
    return lfilter([1.0], [1.0, -spec.rho], eta)


def build_response(x, u, f_true: Callable) -> np.ndarray:
    """y_{t+1} = f(x_t) + u_{t+1}, elementwise over the aligned series."""
    x = check_series(x, "x")
    u = check_series(u, "u")
    check_same_length(("x", x), ("u", u))
    fx = np.asarray(f_true(x), dtype=np.float64)
    if fx.shape != x.shape:
        raise InvalidSpecError("f_true must map the series elementwise")
    if not np.isfinite(fx).all():
        raise NonFiniteDataError("f_true produced a non-finite value")
    return fx + u


def long_run_phi(spec: EtaSpec) -> float:
    """Sum of the filter weights (the long-run scale of eta)."""
    if spec.mode == IID:
        return 1.0
    if spec.mode == AR:
        return 1.0 / (1.0 - spec.lam)
    if spec.mode == MA:
        return 1.0 + spec.lam
    return float(np.sum(spec.coeffs))


def make_sample_path(
    n: int,
    f_true: Callable | None = None,
    innovations: InnovationSpec = InnovationSpec(),
    eta: EtaSpec = EtaSpec(),
    kappa: float = 0.0,
    seed=0,
) -> SamplePath:
    """Generate one full simulated data set.

    ``f_true`` defaults to the identity (the linear truth with intercept
    zero and unit slope).  ``seed`` may be an integer or a Generator;
    integer seeds are keyed through the frozen recipe in
    :mod:`kernspec.rng`.
    """
    rng = as_generator(seed)
    if f_true is None:
        f_true = lambda x: x
    eps_full, u_full = draw_innovations(n + 1, innovations, rng)
    eta_series = build_eta(eps_full[:n], eta, rng)
    x = build_regressor(eta_series, RegressorSpec(n=n, kappa=kappa))
    y = build_response(x, u_full[1:], f_true)
    return SamplePath(
        n=n,
        x=x,
        u=u_full[1:],
        y=y,
        eps=eps_full[:n],
        seed=seed if isinstance(seed, (int, np.integer)) else None,
    )
