"""Exception hierarchy shared across the package."""


class KernspecError(Exception):
    """Base class for all package-specific errors."""


class InvalidSpecError(KernspecError, ValueError):
    """A configuration object violates its own constraints."""


class NonFiniteDataError(KernspecError, ValueError):
    """An input or intermediate series contains NaN or infinity."""


class SingularDesignError(KernspecError):
    """The regression design matrix is rank deficient (e.g. constant x)."""


class RankDeficiencyError(KernspecError):
    """The Jacobian at an iterate has deficient column rank."""


class DegenerateStatisticError(KernspecError):
    """The self-normalizer is zero, so the standardized statistic is undefined.

    Usually a symptom of a bandwidth too small for any pair of regressor
    values to fall in the same kernel window, or of identically zero
    residuals.
    """


class DivergentMomentError(KernspecError):
    """A requested kernel moment does not exist (not raised by built-ins)."""


class DataError(KernspecError):
    """Ingested data (CSV) is malformed or unusable."""


class ToleranceError(KernspecError):
    """A reference-table reproduction missed its documented tolerance."""
