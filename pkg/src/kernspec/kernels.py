"""Kernel families, their integrals, and power-law bandwidth rules.

Three built-in families are supported, all symmetric, nonnegative and
integrating to one:

* ``gaussian``      : exp(-x^2/2) / sqrt(2 pi) on the whole line
* ``epanechnikov``  : 0.75 (1 - x^2) on [-1, 1]
* ``uniform``       : 1 on [-1/2, 1/2]

Closed forms are used for the squared-kernel integral and absolute
moments; an adaptive-Simpson fallback (tolerance 1e-12) covers anything
without a closed form and doubles as the independent cross-check in the
test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .validation import check_positive

GAUSSIAN = 0
EPANECHNIKOV = 1
UNIFORM = 2

_FAMILY_CODES = {
    "gaussian": GAUSSIAN,
    "epanechnikov": EPANECHNIKOV,
    "uniform": UNIFORM,
}

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Kernel:
    """A named kernel family with a fixed closed-form shape."""

    family: str

    def __post_init__(self):
        if self.family not in _FAMILY_CODES:
            raise InvalidSpecError(
                f"unknown kernel family {self.family!r}; "
                f"choose one of {sorted(_FAMILY_CODES)}"
            )

    @property
    def code(self) -> int:
        """Integer code used by the compiled pair loops."""
        return _FAMILY_CODES[self.family]

    @property
    def support(self) -> tuple[float, float]:
        """Interval outside which the kernel vanishes (truncated for gaussian)."""
        if self.family == "gaussian":
            return (-40.0, 40.0)
        if self.family == "epanechnikov":
            return (-1.0, 1.0)
        return (-0.5, 0.5)

    def __call__(self, x):
        return kernel_eval(self, x)


def get_kernel(name: str | Kernel) -> Kernel:
    """Resolve a kernel from its family name (case-insensitive)."""
    if isinstance(name, Kernel):
        return name
    return Kernel(str(name).strip().lower())


def kernel_eval(kernel: Kernel, x):
    """Evaluate the kernel density shape at ``x`` (scalar or array)."""
    arr = np.asarray(x, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise InvalidSpecError("kernel argument must be finite")
    if kernel.family == "gaussian":
        out = np.exp(-0.5 * arr * arr) / _SQRT_2PI
    elif kernel.family == "epanechnikov":
        out = np.where(np.abs(arr) <= 1.0, 0.75 * (1.0 - arr * arr), 0.0)
    else:
        out = np.where(np.abs(arr) <= 0.5, 1.0, 0.0)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def kernel_l2(kernel: Kernel) -> float:
    """Integral of the squared kernel over the line."""
    if kernel.family == "gaussian":
        return 1.0 / (2.0 * math.sqrt(math.pi))
    if kernel.family == "epanechnikov":
        return 0.6
    if kernel.family == "uniform":
        return 1.0
    lo, hi = kernel.support
    return adaptive_simpson(lambda t: kernel_eval(kernel, t) ** 2, lo, hi)


def kernel_moment(kernel: Kernel, m: int) -> float:
    """Integral of |x|^m K(x) over the line.

    All built-in families have every absolute moment; a
    :class:`~kernspec.errors.DivergentMomentError` is reserved for
    user-defined heavy-tailed kernels.
    """
    m = int(m)
    if m < 0:
        raise InvalidSpecError("moment order must be a nonnegative integer")
    if kernel.family == "gaussian":
        # E|Z|^m for standard normal
        return 2.0 ** (m / 2.0) * math.gamma((m + 1) / 2.0) / math.sqrt(math.pi)
    if kernel.family == "epanechnikov":
        return 3.0 / ((m + 1.0) * (m + 3.0))
    if kernel.family == "uniform":
        return 0.5**m / (m + 1.0)
    lo, hi = kernel.support
    return adaptive_simpson(lambda t: abs(t) ** m * kernel_eval(kernel, t), lo, hi)


@dataclass(frozen=True)
class Bandwidth:
    """A bandwidth together with its provenance and rate diagnostics.

    ``nh2_ok`` proxies the divergence requirement n h^2 -> infinity by
    n h^2 > 1; ``nh4log2_ok`` proxies the shrinkage requirement
    n h^4 log^2 n -> 0 by n h^4 log^2 n < 1.  The second is what the
    endogenous-regressor theory needs; the first is needed always.
    Violations are reported as flags, never as errors.
    """

    h: float
    n: int | None = None
    exponent: float | None = None

    def __post_init__(self):
        check_positive(self.h, "bandwidth h")

    @property
    def nh2_ok(self) -> bool | None:
        if self.n is None:
            return None
        return self.n * self.h**2 > 1.0

    @property
    def nh4log2_ok(self) -> bool | None:
        if self.n is None:
            return None
        return self.n * self.h**4 * math.log(self.n) ** 2 < 1.0


def bandwidth_from_exponent(n: int, p: float) -> Bandwidth:
    """Power-law bandwidth h = n**(-p)."""
    n = int(n)
    if n < 2:
        raise InvalidSpecError(f"sample size must be at least 2, got {n}")
    p = float(p)
    if p <= 0:
        raise InvalidSpecError(f"bandwidth exponent must be positive, got {p}")
    return Bandwidth(h=float(n) ** (-p), n=n, exponent=p)


def parse_exponent(text) -> float:
    """Parse a bandwidth exponent given as a decimal or a fraction string.

    Accepts e.g. ``0.4``, ``"0.25"`` or ``"1/2.5"``.
    """
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidSpecError(f"cannot parse exponent {text!r}") from exc
    try:
        return float(s)
    except ValueError as exc:
        raise InvalidSpecError(f"cannot parse exponent {text!r}") from exc


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature with Richardson acceptance."""

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        fl = f(lmid)
        fr = f(rmid)
        left = simpson(lo, mid, flo, fl, fmid)
        right = simpson(mid, hi, fmid, fr, fhi)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(lo, mid, flo, fl, fmid, left, eps / 2.0, depth + 1) + recurse(
            mid, hi, fmid, fr, fhi, right, eps / 2.0, depth + 1
        )

    a, b = float(a), float(b)
    fa, fb = f(a), f(b)
    mid = 0.5 * (a + b)
    fm = f(mid)
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)
