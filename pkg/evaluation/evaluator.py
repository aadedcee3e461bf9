"""
Evaluation Harness
Location: jetnormals/evaluation/evaluator.py

Scores normal estimates against ground truth on a fixed point subset and
aggregates per-shape reports into a per-category table whose last row is
the unweighted average over categories.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from evaluation.metrics import pgp_alpha, rmse, unoriented_angle_errors
from geometry.point_cloud import PointCloud
from utils.exceptions import InvalidInputError
from utils.helpers import derive_seed, STREAM_SUBSET
from utils.validators import require_int_range

logger = logging.getLogger(__name__)

DEFAULT_SUBSET_SIZE = 5000
DEFAULT_ALPHAS = (5.0, 10.0)
AVERAGE_LABEL = "Average"
NO_CATEGORY = "none"

NOISE_STEM = "_noise_white_"
GRADIENT_STEM = "_ddist_minmax"
STRIPES_STEM = "_ddist_minmax_layers"
_NOISE_PATTERN = re.compile(re.escape(NOISE_STEM) + r"([0-9][0-9.eE+-]*)$")


@dataclass(eq=False)
class EvalReport:
    """Per-point errors of one cloud with their aggregates"""
    per_point_errors: np.ndarray
    rmse: float
    pgp: Dict[float, float]
    category: str = NO_CATEGORY
    eval_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    name: str = "cloud"

    @property
    def mean_error(self) -> float:
        return float(np.mean(self.per_point_errors))

    def as_row(self) -> Dict[str, object]:
        row = {"shape": self.name, "category": self.category, "points": len(self.per_point_errors),
               "rmse": self.rmse}
        row.update({pgp_column(alpha): value for alpha, value in self.pgp.items()})
        return row


def pgp_column(alpha: float) -> str:
    return f"pgp{alpha:g}"


def category_suffix(sigma: float, density: str) -> str:
    """File stem suffix of an augmentation category"""
    if density == "gradient":
        return GRADIENT_STEM
    if density == "stripes":
        return STRIPES_STEM
    if sigma > 0:
        return f"{NOISE_STEM}{sigma:g}"
    return ""


def infer_category(stem: str) -> str:
    """Category label from a benchmark-style file stem"""
    if stem.endswith(STRIPES_STEM):
        return "stripes"
    if stem.endswith(GRADIENT_STEM):
        return "gradient"
    match = _NOISE_PATTERN.search(stem)
    if match:
        try:
            return f"noise {float(match.group(1)):g}"
        except ValueError:
            pass
    return NO_CATEGORY


def _category_order(label: str):
    if label == NO_CATEGORY:
        return (0, 0.0, label)
    if label.startswith("noise "):
        return (1, float(label.split(" ", 1)[1]), label)
    if label in ("gradient", "stripes"):
        return (2, 0.0 if label == "gradient" else 1.0, label)
    return (3, 0.0, label)


def select_subset(n_points: int, size: int, seed: int) -> np.ndarray:
    """Sorted seeded sample of point indices without replacement; all points if size >= n"""
    n_points = require_int_range("n_points", n_points, minimum=1)
    size = require_int_range("subset_size", size, minimum=1)
    if size >= n_points:
        return np.arange(n_points, dtype=np.int64)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n_points, size=size, replace=False)).astype(np.int64)


def _check_indices(indices, n_points: int) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if len(indices) == 0:
        raise InvalidInputError("evaluation subset is empty", "indices")
    if indices.min() < 0 or indices.max() >= n_points:
        raise InvalidInputError(f"subset indices must lie in [0, {n_points - 1}]", "indices")
    return indices


def evaluate_normals(cloud: PointCloud, normals, indices=None, subset_size: int = DEFAULT_SUBSET_SIZE,
                     seed: int = 0, category: Optional[str] = None,
                     alphas: Sequence[float] = DEFAULT_ALPHAS) -> EvalReport:
    """Score full-length estimated normals on the cloud's evaluation subset"""
    if not cloud.has_normals:
        raise InvalidInputError(f"cloud {cloud.name} has no ground-truth normals", "cloud")
    normals = np.asarray(normals, dtype=np.float64)
    if normals.shape != cloud.points.shape:
        raise InvalidInputError(f"{len(normals)} estimated normals for {len(cloud)} points", "normals")

    if indices is None:
        indices = select_subset(len(cloud), subset_size, derive_seed(seed, STREAM_SUBSET))
    indices = _check_indices(indices, len(cloud))
    return _report(cloud, normals[indices], indices, category, alphas)


EstimatorHandle = Union[Callable[[PointCloud, np.ndarray], np.ndarray], object]


def evaluate_cloud(cloud: PointCloud, estimator: EstimatorHandle, subset_size: int = DEFAULT_SUBSET_SIZE,
                   seed: int = 0, indices=None, category: Optional[str] = None,
                   alphas: Sequence[float] = DEFAULT_ALPHAS) -> EvalReport:
    """
    Run an estimator on the evaluation subset and score it.

    The estimator is either an object with estimate(cloud, indices) or a
    callable with the same signature, returning one normal per index.
    """
    if not cloud.has_normals:
        raise InvalidInputError(f"cloud {cloud.name} has no ground-truth normals", "cloud")
    if indices is None:
        indices = select_subset(len(cloud), subset_size, derive_seed(seed, STREAM_SUBSET))
    indices = _check_indices(indices, len(cloud))

    estimate = getattr(estimator, "estimate", estimator)
    estimates = np.asarray(estimate(cloud, indices), dtype=np.float64)
    if estimates.shape != (len(indices), 3):
        raise InvalidInputError(f"estimator returned shape {estimates.shape} for {len(indices)} points",
                                "estimator")
    return _report(cloud, estimates, indices, category, alphas)


def _report(cloud: PointCloud, estimates: np.ndarray, indices: np.ndarray, category: Optional[str],
            alphas: Sequence[float]) -> EvalReport:
    errors = unoriented_angle_errors(estimates, cloud.gt_normals[indices])
    report = EvalReport(
        per_point_errors=errors,
        rmse=rmse(errors),
        pgp={float(alpha): pgp_alpha(errors, alpha) for alpha in sorted(alphas)},
        category=category if category is not None else infer_category(cloud.name),
        eval_indices=indices,
        name=cloud.name,
    )
    logger.info(f"{cloud.name} [{report.category}]: RMSE {report.rmse:.4f} deg over {len(indices)} points")
    return report


def aggregate_categories(reports: Sequence[EvalReport]) -> pd.DataFrame:
    """
    One row per category (mean of its shapes' RMSE and PGP values) and a
    final row averaging the category rows with equal weight.
    """
    if not reports:
        raise InvalidInputError("need at least one report", "reports")
    frame = pd.DataFrame([report.as_row() for report in reports])
    metric_columns = [c for c in frame.columns if c == "rmse" or c.startswith("pgp")]

    table = frame.groupby("category", sort=False)[metric_columns].mean()
    table["shapes"] = frame.groupby("category", sort=False).size()
    table = table.loc[sorted(table.index, key=_category_order)]

    average = table[metric_columns].mean(axis=0)
    average["shapes"] = int(table["shapes"].sum())
    table.loc[AVERAGE_LABEL] = average

    table.index.name = "category"
    table["shapes"] = table["shapes"].astype(int)
    return table.reset_index()[["category", "shapes"] + metric_columns]


def reports_frame(reports: List[EvalReport]) -> pd.DataFrame:
    """Per-shape report rows"""
    return pd.DataFrame([report.as_row() for report in reports])
