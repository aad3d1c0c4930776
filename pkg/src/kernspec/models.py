"""Parametric null families, their fitting, and local alternatives.

A :class:`NullModel` bundles the mean function f(x, theta), its
gradient in theta, the parameter count and a declared growth exponent
``beta`` bounding the gradient by C (1 + |x|^beta).  Linear nulls are
fitted by exact least squares; everything else goes through a damped
Gauss-Newton loop with step halving.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    InvalidSpecError,
    NonFiniteDataError,
    RankDeficiencyError,
    SingularDesignError,
)
from .validation import check_same_length, check_series

MAX_ITERATIONS = 200
MAX_HALVINGS = 30
STEP_TOL = 1e-10
OBJECTIVE_TOL = 1e-12


@dataclass(frozen=True)
class NullModel:
    """A parametric family with analytic gradient.

    ``f(x, theta)`` maps a series and a parameter vector to a series;
    ``grad(x, theta)`` returns the (n, dim) Jacobian in theta.  ``beta``
    is the declared polynomial growth order of the gradient, used only
    by diagnostics.
    """

    name: str
    dim: int
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray, np.ndarray], np.ndarray]
    beta: float

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidSpecError("model needs at least one parameter")
        if self.beta < 0:
            raise InvalidSpecError("growth exponent beta must be nonnegative")


@dataclass
class FitResult:
    theta: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: bool
    objective: float


@dataclass(frozen=True)
class AlternativeSpec:
    """Mean shift rho_n * m(x) added to the null mean; default m is |x|**nu."""

    nu: float
    rho_n: float
    m: Callable | None = None

    def __post_init__(self):
        if self.nu < 0:
            raise InvalidSpecError("nu must be nonnegative")
        if self.rho_n < 0:
            raise InvalidSpecError("rho_n must be nonnegative")

    def shift(self, x):
        if self.m is not None:
            return self.m(x)
        return np.abs(x) ** self.nu


def apply_alternative(f_null: Callable, alt: AlternativeSpec) -> Callable:
    """Return x -> f_null(x) + rho_n * m(x)."""

    def shifted(x):
        return f_null(x) + alt.rho_n * alt.shift(x)

    return shifted


def linear_model() -> NullModel:
    def f(x, theta):
        return theta[0] + theta[1] * x

    def grad(x, theta):
        return np.column_stack([np.ones_like(x), x])

    return NullModel(name="linear", dim=2, f=f, grad=grad, beta=1.0)


def poly_model(k: int) -> NullModel:
    """Polynomial of degree k-1 with k coefficients."""
    k = int(k)
    if k < 1:
        raise InvalidSpecError("polynomial model needs k >= 1 coefficients")

    def f(x, theta):
        return np.polyval(theta[::-1], x)

    def grad(x, theta):
        return np.vander(x, k, increasing=True)

    return NullModel(name=f"poly:{k}", dim=k, f=f, grad=grad, beta=float(k - 1))


def power_model(beta_hint: float = 2.0) -> NullModel:
    """f(x, (a, b, c)) = a + b * x**c.

    Only meaningful on the positive-regressor region: x**c and the
    gradient involve log x, so nonpositive x propagates a
    non-finite-data error.  ``beta_hint`` declares the growth order for
    diagnostics and should match the magnitude of the exponent in use.
    """

    def f(x, theta):
        a, b, c = theta
        return a + b * np.power(x, c)

    def grad(x, theta):
        _, b, c = theta
        xc = np.power(x, c)
        return np.column_stack([np.ones_like(x), xc, b * xc * np.log(x)])

    return NullModel(name="power", dim=3, f=f, grad=grad, beta=float(beta_hint))


def weighted_exp_model() -> NullModel:
    """f(x, (a, b)) = (a + b e^x) / (1 + e^x), bounded, so beta = 0."""

    def f(x, theta):
        a, b = theta
        s = _sigmoid(x)
        return a * (1.0 - s) + b * s

    def grad(x, theta):
        s = _sigmoid(x)
        return np.column_stack([1.0 - s, s])

    return NullModel(name="wexp", dim=2, f=f, grad=grad, beta=0.0)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def get_model(name: str | NullModel) -> NullModel:
    """Resolve a model from its registry name ("linear", "poly:k", "power", "wexp")."""
    if isinstance(name, NullModel):
        return name
    key = str(name).strip().lower()
    if key == "linear":
        return linear_model()
    if key.startswith("poly:"):
        return poly_model(int(key.split(":", 1)[1]))
    if key == "power":
        return power_model()
    if key == "wexp":
        return weighted_exp_model()
    raise InvalidSpecError(
        f"unknown model {name!r}; choose 'linear', 'poly:k', 'power' or 'wexp'"
    )


def fit_linear(x, y) -> FitResult:
    """Exact least squares for y on (1, x)."""
    x = check_series(x, "x", min_len=3)
    y = check_series(y, "y")
    check_same_length(("x", x), ("y", y))
    if np.ptp(x) == 0.0:
        raise SingularDesignError("regressor is constant; the design is singular")
    design = np.column_stack([np.ones_like(x), x])
    theta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2:
        raise SingularDesignError("design matrix is rank deficient")
    resid = y - design @ theta
    return FitResult(
        theta=theta,
        residuals=resid,
        iterations=0,
        converged=True,
        objective=float(resid @ resid),
    )


def residuals(model: NullModel, theta, x, y) -> np.ndarray:
    """y_{t+1} - f(x_t, theta), validating finiteness of the fit."""
    x = check_series(x, "x")
    y = check_series(y, "y")
    check_same_length(("x", x), ("y", y))
    theta = np.asarray(theta, dtype=np.float64)
    fx = np.asarray(model.f(x, theta), dtype=np.float64)
    if not np.isfinite(fx).all():
        raise NonFiniteDataError(f"model {model.name} produced non-finite fitted values")
    return y - fx


def fit_nls(
    model: NullModel,
    x,
    y,
    theta_init,
    max_iterations: int = MAX_ITERATIONS,
) -> FitResult:
    """Damped Gauss-Newton least squares.

    Each iteration solves the linearized normal equations and halves the
    step (up to 30 times) until the objective does not increase.
    Convergence is declared when the relative step falls below 1e-10 or
    the relative objective decrease falls below 1e-12; hitting the
    iteration cap returns the best iterate with ``converged=False``.
    """
    x = check_series(x, "x", min_len=model.dim + 1)
    y = check_series(y, "y")
    check_same_length(("x", x), ("y", y))
    theta = np.asarray(theta_init, dtype=np.float64).copy()
    if theta.shape != (model.dim,):
        raise InvalidSpecError(f"theta_init must have shape ({model.dim},), got {theta.shape}")
    if not np.isfinite(theta).all():
        raise InvalidSpecError("theta_init must be finite")

    resid = residuals(model, theta, x, y)
    objective = float(resid @ resid)
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        jac = np.asarray(model.grad(x, theta), dtype=np.float64)
        if jac.shape != (len(x), model.dim):
            raise InvalidSpecError(
                f"gradient must have shape ({len(x)}, {model.dim}), got {jac.shape}"
            )
        if not np.isfinite(jac).all():
            raise NonFiniteDataError(f"model {model.name} produced a non-finite gradient")
        direction, _, rank, _ = np.linalg.lstsq(jac, resid, rcond=None)
        if rank < model.dim:
            raise RankDeficiencyError(
                f"Jacobian of {model.name} is rank deficient at iterate {iterations}"
            )

        step = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            candidate = theta + step * direction
            try:
                new_resid = residuals(model, candidate, x, y)
            except NonFiniteDataError:
                step *= 0.5
                continue
            new_objective = float(new_resid @ new_resid)
            if new_objective <= objective:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break

        rel_step = step * np.linalg.norm(direction) / (1.0 + np.linalg.norm(theta))
        rel_decrease = (objective - new_objective) / max(objective, np.finfo(float).tiny)
        theta = candidate
        resid = new_resid
        objective = new_objective
        if rel_step < STEP_TOL or rel_decrease < OBJECTIVE_TOL:
            converged = True
            break

    return FitResult(
        theta=theta,
        residuals=resid,
        iterations=iterations,
        converged=converged,
        objective=objective,
    )


def gradient_max_rel_error(model: NullModel, x, theta) -> float:
    """Central-difference check of the analytic gradient (diagnostic)."""
    x = check_series(x, "x")
    theta = np.asarray(theta, dtype=np.float64)
    analytic = np.asarray(model.grad(x, theta), dtype=np.float64)
    worst = 0.0
    for i in range(model.dim):
        h = 1e-6 * (1.0 + abs(theta[i]))
        up = theta.copy()
        up[i] += h
        down = theta.copy()
        down[i] -= h
        numeric = (model.f(x, up) - model.f(x, down)) / (2.0 * h)
        scale = np.maximum(np.abs(analytic[:, i]), 1.0)
        worst = max(worst, float(np.max(np.abs(numeric - analytic[:, i]) / scale)))
    return worst


def gradient_growth_constant(model: NullModel, x, theta) -> float:
    """Smallest C with |grad| <= C (1 + |x|^beta) on the sample (diagnostic)."""
    x = check_series(x, "x")
    theta = np.asarray(theta, dtype=np.float64)
    g = np.abs(np.asarray(model.grad(x, theta), dtype=np.float64))
    bound = 1.0 + np.abs(x) ** model.beta
    return float(np.max(g / bound[:, None]))
