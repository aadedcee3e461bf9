"""
Error Heatmaps
Location: jetnormals/evaluation/heatmap.py

Per-point angle errors exported for visual inspection: a continuous 0-90
degree colormap value plus a three-band class (blue below 5 degrees, green
from 5 to 10, red above 10). CSV rows or an ASCII PLY with vertex colors.
"""

import logging

import numpy as np
import pandas as pd
from matplotlib import colormaps

from geometry.point_cloud import PointCloud
from utils.exceptions import InvalidInputError
from utils.helpers import atomic_write_text, format_real
from utils.validators import require_choice

logger = logging.getLogger(__name__)

MAX_ERROR_DEG = 90.0
BAND_LIMITS = (5.0, 10.0)
BANDS = ("blue", "green", "red")
COLORMAP = "jet"


def error_band(error_deg: float) -> str:
    """Three-band class of one error"""
    if error_deg < BAND_LIMITS[0]:
        return BANDS[0]
    if error_deg <= BAND_LIMITS[1]:
        return BANDS[1]
    return BANDS[2]


def colormap_value(errors) -> np.ndarray:
    """Errors mapped linearly from [0, 90] degrees to [0, 1]"""
    return np.clip(np.asarray(errors, dtype=np.float64) / MAX_ERROR_DEG, 0.0, 1.0)


def heatmap_frame(cloud: PointCloud, errors, indices=None) -> pd.DataFrame:
    """x, y, z, err_deg, value and band per evaluated point"""
    errors = np.asarray(errors, dtype=np.float64).reshape(-1)
    indices = np.arange(len(cloud)) if indices is None else np.asarray(indices, dtype=np.int64)
    if len(indices) != len(errors):
        raise InvalidInputError(f"{len(errors)} errors for {len(indices)} evaluated points", "errors")
    points = cloud.points[indices]
    return pd.DataFrame({
        "x": points[:, 0],
        "y": points[:, 1],
        "z": points[:, 2],
        "err_deg": errors,
        "value": colormap_value(errors),
        "band": [error_band(e) for e in errors],
    })


def _ply_text(frame: pd.DataFrame) -> str:
    rgb = np.rint(colormaps[COLORMAP](frame["value"].to_numpy())[:, :3] * 255).astype(int)
    header = [
        "ply",
        "format ascii 1.0",
        "comment unoriented normal angle error heatmap, 0-90 degrees",
        f"element vertex {len(frame)}",
        "property double x",
        "property double y",
        "property double z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "property double err_deg",
        "end_header",
    ]
    rows = [
        f"{format_real(x)} {format_real(y)} {format_real(z)} {r} {g} {b} {format_real(e)}"
        for (x, y, z, e), (r, g, b) in zip(frame[["x", "y", "z", "err_deg"]].to_numpy().tolist(), rgb.tolist())
    ]
    return "\n".join(header + rows) + "\n"


def export_heatmap(cloud: PointCloud, errors, path, indices=None, fmt: str = "csv"):
    """Write the heatmap of the evaluated points as CSV or ASCII PLY"""
    require_choice("format", fmt, ("csv", "ply"))
    frame = heatmap_frame(cloud, errors, indices)
    if fmt == "ply":
        text = _ply_text(frame)
    else:
        text = frame[["x", "y", "z", "err_deg", "band"]].to_csv(index=False, float_format="%.10g")
    target = atomic_write_text(path, text)
    logger.info(f"Wrote {fmt} heatmap of {len(frame)} points to {target}")
    return target
