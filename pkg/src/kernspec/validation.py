"""Small input-validation helpers used at the public API boundary."""

from __future__ import annotations

import numpy as np

from .errors import InvalidSpecError, NonFiniteDataError


def check_series(a, name: str = "series", min_len: int = 1) -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting non-finite entries."""
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidSpecError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise InvalidSpecError(f"{name} needs at least {min_len} entries, got {arr.size}")
    if not np.isfinite(arr).all():
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise NonFiniteDataError(f"{name} has a non-finite value at position {bad}")
    return arr


def check_same_length(*named: tuple[str, np.ndarray]) -> int:
    """Assert that all named arrays share one length; return it."""
    lengths = {name: len(arr) for name, arr in named}
    sizes = set(lengths.values())
    if len(sizes) != 1:
        raise InvalidSpecError(f"length mismatch: {lengths}")
    return sizes.pop()


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise InvalidSpecError(f"{name} must be positive and finite, got {value}")
    return value


def check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise InvalidSpecError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value
