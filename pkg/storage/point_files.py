"""
Point File Formats
Location: jetnormals/storage/point_files.py

Plain-text files in the common benchmark convention: `.xyz` (three reals
per line), `.normals` (three reals per line, same order), `.idx` / `.pidx`
(one point index per line) and shape lists (one stem per line). Output
uses '.' as the decimal separator regardless of locale and is written
atomically.
"""

import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np

from geometry.point_cloud import PointCloud
from utils.exceptions import InvalidInputError, PointFileParseError
from utils.helpers import PathLike, atomic_write_text, format_row, sibling_path

logger = logging.getLogger(__name__)

NORMAL_LOAD_TOLERANCE = 1e-3
POINT_DIGITS = 17
NORMAL_DIGITS = 10


def _read_lines(path: PathLike) -> List[str]:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"file not found: {path}", "path")
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read().splitlines()


def _parse_triples(path: PathLike) -> np.ndarray:
    """Rows of exactly three finite reals; blank lines are skipped"""
    rows = []
    for line_number, line in enumerate(_read_lines(path), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 3:
            raise PointFileParseError(str(path), line_number, f"expected 3 values, found {len(fields)}")
        try:
            row = [float(value) for value in fields]
        except ValueError:
            raise PointFileParseError(str(path), line_number, f"not a number in {line.strip()!r}")
        if not all(math.isfinite(value) for value in row):
            raise PointFileParseError(str(path), line_number, "non-finite value")
        rows.append(row)
    return np.array(rows, dtype=np.float64).reshape(-1, 3)


def read_normals(path: PathLike, expected: Optional[int] = None) -> np.ndarray:
    """
    Load normals, normalizing rows within NORMAL_LOAD_TOLERANCE of unit length.

    Rows further from unit length are rejected with their line number.
    """
    normals = _parse_triples(path)
    if expected is not None and len(normals) != expected:
        raise InvalidInputError(f"{path} has {len(normals)} normals for {expected} points", "normals")

    norms = np.linalg.norm(normals, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > NORMAL_LOAD_TOLERANCE)
    if len(bad):
        raise PointFileParseError(str(path), int(bad[0]) + 1, f"normal has length {norms[bad[0]]:.6g}")
    if np.any(norms != 1.0):
        logger.debug(f"Normalizing {int(np.count_nonzero(norms != 1.0))} normals loaded from {path}")
    return normals / norms[:, None] if len(normals) else normals


def read_points(path: PathLike, name: Optional[str] = None) -> PointCloud:
    """Load an .xyz cloud and, when present, its sibling .normals file"""
    points = _parse_triples(path)
    if len(points) == 0:
        raise InvalidInputError(f"{path} contains no points", "path")

    normals_path = sibling_path(path, ".normals")
    normals = read_normals(normals_path, expected=len(points)) if normals_path.is_file() else None
    cloud = PointCloud(points=points, gt_normals=normals, name=name or Path(path).stem)
    logger.debug(f"Read {len(cloud)} points from {path}{' with normals' if normals is not None else ''}")
    return cloud


def write_points(path: PathLike, points) -> Path:
    """Three reals per line, full double precision"""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    return atomic_write_text(path, "".join(format_row(row, POINT_DIGITS) + "\n" for row in points))


def write_normals(path: PathLike, normals) -> Path:
    """Three reals per line with ten significant digits; an empty sequence gives an empty file"""
    normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
    return atomic_write_text(path, "".join(format_row(row, NORMAL_DIGITS) + "\n" for row in normals))


def read_indices(path: PathLike, n_points: Optional[int] = None) -> np.ndarray:
    """One non-negative integer per line (.idx or .pidx)"""
    indices = []
    for line_number, line in enumerate(_read_lines(path), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            value = int(text)
        except ValueError:
            raise PointFileParseError(str(path), line_number, f"not an integer: {text!r}")
        if value < 0 or (n_points is not None and value >= n_points):
            raise PointFileParseError(str(path), line_number, f"index {value} out of range")
        indices.append(value)
    return np.array(indices, dtype=np.int64)


def write_indices(path: PathLike, indices: Iterable[int]) -> Path:
    return atomic_write_text(path, "".join(f"{int(i)}\n" for i in indices))


def read_stem_list(path: PathLike) -> List[str]:
    """Shape stems listed one per line (trainset.txt / testset.txt)"""
    return [line.strip() for line in _read_lines(path) if line.strip()]


def write_stem_list(path: PathLike, stems: Iterable[str]) -> Path:
    return atomic_write_text(path, "".join(f"{stem}\n" for stem in stems))
