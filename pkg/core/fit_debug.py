"""
Single-Patch Fit Inspection
Location: jetnormals/core/fit_debug.py

Runs one estimator on the patch of a single query point and exports what
it decided: per-neighbor weights and selection, the points the jet was
fitted to, a grid of the fitted surface and a short text summary. All
coordinates are in the frame the jet was fitted in (the PCA patch frame,
rotated once more by the QST for the learned method).
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd

from evaluation.metrics import unoriented_angle_error
from fitting.jets import JetModel, ls_fit, normal_from_beta, surface_grid
from geometry.neighbors import build_knn_index
from geometry.patches import Patch, extract_patch
from geometry.point_cloud import PointCloud
from network.pipeline import forward_pipeline
from storage.reports import frame_to_csv
from utils.helpers import atomic_write_text, format_row
from utils.validators import require_choice, require_int_range

logger = logging.getLogger(__name__)

SUFFIXES = ("_selection.csv", "_points.csv", "_surface.csv", "_summary.txt")


@dataclass(eq=False)
class FitDebugResult:
    method: str
    patch: Patch
    normal: np.ndarray
    weights: np.ndarray
    selected: np.ndarray
    fitted_points: np.ndarray
    jet: JetModel
    error_deg: Optional[float] = None

    def selection_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "index": self.patch.neighbor_indices,
            "weight": self.weights,
            "selected": self.selected.astype(int),
        })


def debug_patch(cloud: PointCloud, center: int, method: str, patch_size: int, order: int = 3,
                checkpoint=None) -> FitDebugResult:
    """Fit one patch and keep everything needed for inspection"""
    require_choice("method", method, ("pca", "jet", "learned"))
    center = require_int_range("center", center, 0, len(cloud) - 1)
    if method == "learned":
        patch_size = checkpoint.network_config.patch_size
    patch = extract_patch(cloud, build_knn_index(cloud), center, patch_size)
    everything = np.ones(patch.size, dtype=bool)

    if method == "learned":
        result = forward_pipeline(checkpoint.params, patch)
        weights = result.tape.weights.values[0].detach().numpy().copy()
        selected = np.zeros(patch.size, dtype=bool)
        selected[result.selection.index_list()] = True
        debug = FitDebugResult(method, patch, result.normal, weights, selected, result.updated_points, result.jet)
    elif method == "jet":
        jet, _ = ls_fit(patch.local_points, order)
        normal = patch.direction_to_world(normal_from_beta(jet))
        debug = FitDebugResult(method, patch, normal, np.ones(patch.size), everything, patch.local_points, jet)
    else:
        plane = JetModel(order=1, beta=np.zeros(3))
        debug = FitDebugResult(method, patch, patch.to_world_rotation[:, 2].copy(), np.ones(patch.size),
                               everything, patch.local_points, plane)

    if cloud.has_normals:
        debug.error_deg = unoriented_angle_error(debug.normal, cloud.gt_normals[center])
    return debug


def summary_text(debug: FitDebugResult) -> str:
    lines = [
        f"method = {debug.method}",
        f"center = {debug.patch.center_index}",
        f"patch_size = {debug.patch.size}",
        f"selected = {int(debug.selected.sum())}",
        f"order = {debug.jet.order}",
        f"normal = {format_row(debug.normal)}",
        f"beta = {format_row(debug.jet.beta)}",
    ]
    if debug.error_deg is not None:
        lines.append(f"error_deg = {debug.error_deg:.10g}")
    return "\n".join(lines) + "\n"


def export_fit_debug(debug: FitDebugResult, prefix: str, grid: int = 32) -> Dict[str, Path]:
    """Write <prefix>_selection.csv, _points.csv, _surface.csv and _summary.txt"""
    grid = require_int_range("grid", grid, minimum=2)
    extent = float(np.max(np.abs(debug.fitted_points[:, :2]))) or 1.0
    surface = surface_grid(debug.jet, extent=extent, resolution=grid)

    paths = {
        "selection": frame_to_csv(debug.selection_frame(), f"{prefix}{SUFFIXES[0]}"),
        "points": frame_to_csv(pd.DataFrame(debug.fitted_points, columns=["x", "y", "z"]), f"{prefix}{SUFFIXES[1]}"),
        "surface": frame_to_csv(pd.DataFrame(surface, columns=["x", "y", "z"]), f"{prefix}{SUFFIXES[2]}"),
        "summary": atomic_write_text(f"{prefix}{SUFFIXES[3]}", summary_text(debug)),
    }
    logger.info(f"Fit inspection of point {debug.patch.center_index} written to {prefix}_*")
    return paths
