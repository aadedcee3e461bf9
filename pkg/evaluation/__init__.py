"""
Evaluation Package
Location: jetnormals/evaluation/__init__.py

Angle-error metrics, per-cloud reports, category tables and heatmaps.
"""

from .evaluator import (
    AVERAGE_LABEL,
    DEFAULT_ALPHAS,
    DEFAULT_SUBSET_SIZE,
    EvalReport,
    aggregate_categories,
    category_suffix,
    evaluate_cloud,
    evaluate_normals,
    infer_category,
    reports_frame,
    select_subset,
)
from .heatmap import error_band, export_heatmap
from .metrics import pgp_alpha, rmse, unoriented_angle_error, unoriented_angle_errors

__all__ = [
    'AVERAGE_LABEL', 'DEFAULT_ALPHAS', 'DEFAULT_SUBSET_SIZE', 'EvalReport', 'aggregate_categories',
    'category_suffix', 'evaluate_cloud', 'evaluate_normals', 'infer_category', 'reports_frame',
    'select_subset', 'error_band', 'export_heatmap',
    'pgp_alpha', 'rmse', 'unoriented_angle_error', 'unoriented_angle_errors',
]
