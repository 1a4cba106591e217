"""Small input-validation helpers shared across the package.

These keep argument checking uniform: every helper returns the validated
(and possibly converted) value so call sites stay one-liners.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigError, DomainError, ShapeError


def as_float_vector(x, name: str) -> np.ndarray:
    """Convert to a 1-D float64 array, rejecting empty or higher-rank input."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ShapeError(f"{name} must be nonempty")
    return arr


def as_bit_vector(x, name: str) -> np.ndarray:
    """Convert to a 1-D int array of 0/1 values."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr = arr.astype(np.int64, casting="unsafe")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise DomainError(f"{name} must contain only 0 and 1")
    return arr


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0.0:
        raise ConfigError(f"{name} must be positive, got {value}")
    return value


def check_nonnegative(value: float, name: str) -> float:
    value = float(value)
    if value < 0.0:
        raise ConfigError(f"{name} must not be negative, got {value}")
    return value


def check_int_at_least(value, minimum: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")
    return value


def check_power_of_two(value, name: str) -> int:
    value = check_int_at_least(value, 2, name)
    if value & (value - 1):
        raise ConfigError(f"{name} must be a power of two, got {value}")
    return value
