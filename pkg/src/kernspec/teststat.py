"""The kernel-smoothed pair statistic, its self-normalized z form, the
martingale/estimation-error decomposition, and the theoretical scale
constants.

For residuals uhat aligned with regressor values x, the raw statistic is

    S = sum_{s != t} uhat_{t+1} uhat_{s+1} K[(x_t - x_s)/h],

a U-statistic whose kernel weights load on near self-intersections of
the regressor path.  Self-normalizing by

    V^2 = sum_{s != t} uhat_{t+1}^2 uhat_{s+1}^2 K^2[(x_t - x_s)/h]

gives z = S / (sqrt(2) sqrt(V^2)), which is asymptotically standard
normal under the null, free of nuisance scale parameters.  Rejection is
one-sided in the upper tail: misspecification inflates S through a
nonnegative quadratic term.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy.stats import norm
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import _pairsums
from .dgp import SamplePath
from .errors import DegenerateStatisticError, InvalidSpecError
from .kernels import Kernel, bandwidth_from_exponent, get_kernel, kernel_l2
from .models import NullModel, fit_linear, fit_nls, get_model
from .validation import check_positive, check_probability, check_same_length, check_series


@dataclass(frozen=True)
class TestResult:
    """Outcome of one specification test."""

    statistic: float
    norm_sq: float
    z: float
    p_value: float
    reject_05: bool
    reject_01: bool
    alpha: float
    reject: bool
    n: int
    h: float
    kernel: str
    pairs_used: int
    model: str
    theta: np.ndarray
    converged: bool


@dataclass(frozen=True)
class Decomposition:
    """Split of the raw statistic into martingale and estimation-error parts.

    ``recombined = 2 martingale_part + 2 cross_part + estimation_part``
    reproduces the statistic computed from the fitted residuals.
    """

    martingale_part: float
    cross_part: float
    estimation_part: float
    weighted_error_sums: np.ndarray
    weighted_error_sq_total: float

    @property
    def recombined(self) -> float:
        return 2.0 * self.martingale_part + 2.0 * self.cross_part + self.estimation_part


@dataclass(frozen=True)
class TheoryNormalizers:
    """Deterministic scale constants of the limit theory.

    ``var_scale_sq`` scales the conditional variance of the martingale
    part; ``stat_scale_sq`` scales the raw statistic.  Their ratio is
    always sigma^2 / 4.
    """

    var_scale_sq: float
    stat_scale_sq: float
    sigma: float
    phi: float
    n: int
    h: float
    kernel_l2: float


def _prepare(u_hat, x, kernel, h):
    u_hat = check_series(u_hat, "u_hat", min_len=2)
    x = check_series(x, "x", min_len=2)
    check_same_length(("u_hat", u_hat), ("x", x))
    check_positive(h, "bandwidth h")
    return u_hat, x, get_kernel(kernel), float(h)


def u_statistic(u_hat, x, kernel, h: float) -> float:
    """Raw pair statistic S over all ordered pairs s != t."""
    u_hat, x, kernel, h = _prepare(u_hat, x, kernel, h)
    s, _ = _pairsums.pair_stats(u_hat, x, h, kernel.code)
    return s


def self_norm_sq(u_hat, x, kernel, h: float) -> float:
    """Self-normalizer V^2 over all ordered pairs s != t."""
    u_hat, x, kernel, h = _prepare(u_hat, x, kernel, h)
    _, v2 = _pairsums.pair_stats(u_hat, x, h, kernel.code)
    return v2


def pair_statistics(u_hat, x, kernel, h: float) -> tuple[float, float, int]:
    """One-pass (S, V^2, ordered-pair count)."""
    u_hat, x, kernel, h = _prepare(u_hat, x, kernel, h)
    s, v2 = _pairsums.pair_stats(u_hat, x, h, kernel.code)
    n = len(u_hat)
    return s, v2, n * (n - 1)


def z_statistic(statistic: float, norm_sq: float) -> float:
    """Standardized statistic S / (sqrt(2) sqrt(V^2))."""
    if norm_sq < 0:
        raise InvalidSpecError("self-normalizer must be nonnegative")
    if norm_sq == 0.0:
        raise DegenerateStatisticError(
            "self-normalizer is zero: no kernel overlap between pairs "
            "(bandwidth too small or sample too short) or residuals identically zero"
        )
    return statistic / (sqrt(2.0) * sqrt(norm_sq))


def run_test(
    data,
    model: str | NullModel = "linear",
    kernel: str | Kernel = "gaussian",
    h: float | None = None,
    bw_exponent: float | None = None,
    alpha: float = 0.05,
    theta_init=None,
) -> TestResult:
    """Fit the null family, form residuals, and run the one-sided test.

    ``data`` is a :class:`~kernspec.dgp.SamplePath` or an (x, y) pair.
    Either ``h`` or ``bw_exponent`` (h = n**-p) fixes the bandwidth;
    the exponent defaults to 1/3 when neither is given.  Nonlinear
    families need ``theta_init``.
    """
    x, y = as_xy(data)
    x = check_series(x, "x", min_len=3)
    y = check_series(y, "y", min_len=3)
    check_same_length(("x", x), ("y", y))
    alpha = check_probability(alpha, "alpha")
    model = get_model(model)
    kernel = get_kernel(kernel)
    n = len(x)
    if h is None:
        p = 1.0 / 3.0 if bw_exponent is None else float(bw_exponent)
        h = bandwidth_from_exponent(n, p).h
    h = check_positive(h, "bandwidth h")

    if model.name == "linear":
        fit = fit_linear(x, y)
    else:
        if theta_init is None:
            raise InvalidSpecError(f"model {model.name!r} needs theta_init")
        fit = fit_nls(model, x, y, theta_init)

    statistic, norm_sq, pairs = pair_statistics(fit.residuals, x, kernel, h)
    z = z_statistic(statistic, norm_sq)
    p_value = float(norm.sf(z))
    return TestResult(
        statistic=statistic,
        norm_sq=norm_sq,
        z=z,
        p_value=p_value,
        reject_05=bool(z >= norm.isf(0.05)),
        reject_01=bool(z >= norm.isf(0.01)),
        alpha=alpha,
        reject=bool(z >= norm.isf(alpha)),
        n=n,
        h=h,
        kernel=kernel.family,
        pairs_used=pairs,
        model=model.name,
        theta=fit.theta,
        converged=fit.converged,
    )


def as_xy(data) -> tuple[np.ndarray, np.ndarray]:
    """Extract the aligned (x, y) pair from a SamplePath or a 2-tuple."""
    if isinstance(data, SamplePath):
        return data.x, data.y
    if isinstance(data, (tuple, list)) and len(data) == 2:
        return np.asarray(data[0], dtype=float), np.asarray(data[1], dtype=float)
    raise InvalidSpecError("data must be a SamplePath or an (x, y) pair")


def decompose(u_true, theta_true, theta_hat, model: NullModel, x, kernel, h: float) -> Decomposition:
    """Split the statistic given the true errors and parameter (simulation only).

    With d_t = f(x_t, theta_true) - f(x_t, theta_hat), the parts are the
    pure-error martingale sum, the error-by-estimation cross sum, and
    the pure-estimation sum; twice the first two plus the third equals
    the statistic computed from the fitted residuals.
    """
    u_true = check_series(u_true, "u_true", min_len=2)
    x = check_series(x, "x", min_len=2)
    check_same_length(("u_true", u_true), ("x", x))
    kernel = get_kernel(kernel)
    h = check_positive(h, "bandwidth h")
    theta_true = np.asarray(theta_true, dtype=np.float64)
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    delta = np.asarray(model.f(x, theta_true) - model.f(x, theta_hat), dtype=np.float64)

    weighted = _pairsums.weighted_error_sums(u_true, x, h, kernel.code)
    martingale = float(u_true @ weighted)
    cross = _pairsums.cross_pair_sum(u_true, delta, x, h, kernel.code)
    estimation = _pairsums.cross_pair_sum(delta, delta, x, h, kernel.code)
    return Decomposition(
        martingale_part=martingale,
        cross_part=cross,
        estimation_part=estimation,
        weighted_error_sums=weighted,
        weighted_error_sq_total=float(weighted @ weighted),
    )


def theory_normalizers(n: int, h: float, sigma: float, phi: float, kernel) -> TheoryNormalizers:
    """Scale constants (2 phi)^-1 sigma^2 n^{3/2} h I(K^2) and sigma^2/4 times it."""
    if sigma <= 0:
        raise InvalidSpecError("sigma must be positive")
    if phi == 0:
        raise InvalidSpecError("long-run coefficient phi must be nonzero")
    check_positive(h, "bandwidth h")
    kernel = get_kernel(kernel)
    l2 = kernel_l2(kernel)
    var_scale_sq = sigma**2 * float(n) ** 1.5 * h * l2 / (2.0 * phi)
    stat_scale_sq = sigma**4 * float(n) ** 1.5 * h * l2 / (8.0 * phi)
    return TheoryNormalizers(
        var_scale_sq=var_scale_sq,
        stat_scale_sq=stat_scale_sq,
        sigma=sigma,
        phi=phi,
        n=int(n),
        h=float(h),
        kernel_l2=l2,
    )


class KernelSpecTest(BaseEstimator):
    """Scikit-learn style wrapper around :func:`run_test`.

    Parameters mirror the functional API; ``fit(x, y)`` runs the test
    and exposes the outcome through fitted attributes (``statistic_``,
    ``z_``, ``p_value_``, ``reject_``, ``theta_`` and ``result_``).
    ``predict(x)`` evaluates the fitted null mean, so the object
    composes with pipelines and model-selection utilities.
    """

    def __init__(
        self,
        model="linear",
        kernel="gaussian",
        bandwidth=None,
        bw_exponent=None,
        alpha=0.05,
        theta_init=None,
    ):
        self.model = model
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.bw_exponent = bw_exponent
        self.alpha = alpha
        self.theta_init = theta_init

    def fit(self, x, y):
        result = run_test(
            (np.asarray(x, dtype=float).ravel(), y),
            model=self.model,
            kernel=self.kernel,
            h=self.bandwidth,
            bw_exponent=self.bw_exponent,
            alpha=self.alpha,
            theta_init=self.theta_init,
        )
        self.result_ = result
        self.statistic_ = result.statistic
        self.norm_sq_ = result.norm_sq
        self.z_ = result.z
        self.p_value_ = result.p_value
        self.reject_ = result.reject
        self.theta_ = result.theta
        self.n_ = result.n
        self.bandwidth_ = result.h
        return self

    def predict(self, x):
        if not hasattr(self, "theta_"):
            raise NotFittedError("call fit before predict")
        x = check_series(np.asarray(x, dtype=float).ravel(), "x")
        return get_model(self.model).f(x, self.theta_)
