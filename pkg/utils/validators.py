"""
Input Validators
Location: jetnormals/utils/validators.py

Validation functions for operation arguments and run parameters. Each
`require_*` helper raises InvalidInputError naming the offending field.
"""

import math
from typing import Iterable

import numpy as np

from utils.exceptions import InvalidInputError

UNIT_TOLERANCE = 1e-6


def require_int_range(field: str, value: int, minimum: int = None, maximum: int = None) -> int:
    """Validate an integer against optional inclusive bounds"""
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidInputError(f"expected an integer, got {value!r}", field)
    value = int(value)
    if minimum is not None and value < minimum:
        raise InvalidInputError(f"must be >= {minimum}, got {value}", field)
    if maximum is not None and value > maximum:
        raise InvalidInputError(f"must be <= {maximum}, got {value}", field)
    return value


def require_real_range(field: str, value: float, minimum: float = None, maximum: float = None,
                       strict_minimum: bool = False) -> float:
    """Validate a finite real against optional bounds"""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidInputError(f"expected a real number, got {value!r}", field)
    if not math.isfinite(value):
        raise InvalidInputError(f"must be finite, got {value}", field)
    if minimum is not None:
        if strict_minimum and value <= minimum:
            raise InvalidInputError(f"must be > {minimum}, got {value}", field)
        if not strict_minimum and value < minimum:
            raise InvalidInputError(f"must be >= {minimum}, got {value}", field)
    if maximum is not None and value > maximum:
        raise InvalidInputError(f"must be <= {maximum}, got {value}", field)
    return value


def require_choice(field: str, value: str, choices: Iterable[str]) -> str:
    """Validate membership in a fixed set of labels"""
    choices = tuple(choices)
    if value not in choices:
        raise InvalidInputError(f"must be one of {', '.join(choices)}, got {value!r}", field)
    return value


def require_points(field: str, points) -> np.ndarray:
    """Copy to a finite (N, 3) float64 array"""
    array = np.array(points, dtype=np.float64)
    if array.ndim != 2 or array.shape[1] != 3:
        raise InvalidInputError(f"expected shape (N, 3), got {array.shape}", field)
    if not np.all(np.isfinite(array)):
        raise InvalidInputError("contains non-finite coordinates", field)
    return array


def require_unit_vectors(field: str, vectors, tolerance: float = UNIT_TOLERANCE) -> np.ndarray:
    """Coerce to (N, 3) and check every row has unit length"""
    array = require_points(field, vectors)
    if len(array):
        norms = np.linalg.norm(array, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > tolerance:
            raise InvalidInputError(f"vectors must have unit length (worst deviation {worst:.3g})", field)
    return array


def normalize_rows(field: str, vectors) -> np.ndarray:
    """Unit copies of one 3-vector or (N, 3) rows; zero or non-finite rows are rejected"""
    array = np.asarray(vectors, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    if array.ndim != 2 or array.shape[1] != 3:
        raise InvalidInputError(f"expected 3-vectors, got shape {array.shape}", field)
    norms = np.linalg.norm(array, axis=1, keepdims=True)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise InvalidInputError("zero or non-finite vector", field)
    return array / norms
