"""Input validation helpers used by the public entry points."""

from __future__ import annotations

import numpy as np

from .errors import EmptySample, NegativeCount

__all__ = ["check_counts", "check_count_values", "check_positive", "check_unit_open"]


def check_counts(data, min_size: int = 2) -> np.ndarray:
    """Coerce ``data`` to a 1-D int64 array of nonnegative counts.

    Accepts any sequence or array of integers (a single-column 2-D array is
    flattened, so sklearn-style ``(n, 1)`` inputs work).  Raises
    :class:`EmptySample` when fewer than ``min_size`` values are present and
    :class:`NegativeCount` for negative entries.  Non-integral or non-finite
    values raise ``ValueError``.
    """
    arr = np.asarray(data)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D sequence of counts, got shape {arr.shape}")
    if arr.size < min_size:
        raise EmptySample(f"need at least {min_size} counts, got {arr.size}")
    if arr.dtype == object or arr.dtype.kind not in "iuf":
        raise ValueError(f"counts must be numeric, got dtype {arr.dtype}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)):
            raise ValueError("counts must be finite")
        if not np.all(arr == np.floor(arr)):
            raise ValueError("counts must be integers")
    if np.any(arr < 0):
        raise NegativeCount("counts must be nonnegative")
    return arr.astype(np.int64)


def check_count_values(x):
    """Coerce pmf evaluation points to nonnegative integers.

    Unlike :func:`check_counts` this keeps the input's shape (scalars stay
    0-d) and puts no lower bound on the size.
    """
    arr = np.asarray(x)
    if arr.dtype == object or arr.dtype.kind not in "iuf":
        raise ValueError(f"count values must be numeric, got dtype {arr.dtype}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)):
            raise ValueError("count values must be finite")
        if not np.all(arr == np.floor(arr)):
            raise ValueError("count values must be integers")
    if np.any(arr < 0):
        raise NegativeCount("count values must be nonnegative")
    return arr.astype(np.int64)


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive and finite, got {value}")
    return value


def check_unit_open(value: float, name: str) -> float:
    """Validate a probability-like quantity in the open interval (0, 1)."""
    value = float(value)
    if not np.isfinite(value) or not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value}")
    return value
