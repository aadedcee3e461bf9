"""
Angle Error Metrics
Location: jetnormals/evaluation/metrics.py

Unoriented normal angle errors and their aggregates, all in degrees.
"""

import numpy as np

from utils.exceptions import InvalidInputError
from utils.validators import normalize_rows, require_real_range


def unoriented_angle_errors(estimates, gts) -> np.ndarray:
    """
    Row-wise angle in degrees between lines spanned by two vectors, in [0, 90].

    Computed as atan2(|a x b|, |a . b|), which equals arccos(|a . b|) for unit
    inputs and stays exact at 0 and 90 degrees.
    """
    a = normalize_rows("estimate", estimates)
    b = normalize_rows("gt", gts)
    if len(a) != len(b):
        raise InvalidInputError(f"{len(a)} estimates for {len(b)} ground-truth normals", "estimate")
    sine = np.linalg.norm(np.cross(a, b), axis=1)
    cosine = np.abs(np.sum(a * b, axis=1))
    return np.degrees(np.arctan2(sine, cosine))


def unoriented_angle_error(estimate, gt) -> float:
    """Angle between one estimated and one ground-truth normal, sign ignored"""
    return float(unoriented_angle_errors(estimate, gt)[0])


def _non_empty(errors) -> np.ndarray:
    errors = np.asarray(errors, dtype=np.float64).reshape(-1)
    if len(errors) == 0:
        raise InvalidInputError("no errors to aggregate", "errors")
    return errors


def rmse(errors) -> float:
    """Root mean square of angle errors"""
    errors = _non_empty(errors)
    return float(np.sqrt(np.mean(errors * errors)))


def pgp_alpha(errors, alpha: float) -> float:
    """Percentage of good points: share of errors strictly below alpha degrees"""
    errors = _non_empty(errors)
    alpha = require_real_range("alpha", alpha, 0.0, strict_minimum=True)
    return float(100.0 * np.count_nonzero(errors < alpha) / len(errors))
