"""
Point Cloud Container
Location: jetnormals/geometry/point_cloud.py

The immutable point container shared by generators, estimators and
evaluators, plus simple whole-cloud measurements.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from utils.exceptions import InvalidInputError
from utils.validators import require_points, require_unit_vectors


@dataclass(frozen=True, eq=False)
class PointCloud:
    """N positions with optional unit ground-truth normals"""
    points: np.ndarray
    gt_normals: Optional[np.ndarray] = None
    name: str = "cloud"

    def __post_init__(self):
        points = require_points("points", self.points)
        if len(points) == 0:
            raise InvalidInputError("point cloud must not be empty", "points")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

        if self.gt_normals is not None:
            normals = require_unit_vectors("gt_normals", self.gt_normals)
            if len(normals) != len(points):
                raise InvalidInputError(
                    f"{len(normals)} normals for {len(points)} points", "gt_normals")
            normals.setflags(write=False)
            object.__setattr__(self, "gt_normals", normals)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def has_normals(self) -> bool:
        return self.gt_normals is not None

    def subset(self, indices: Sequence[int], name: str = None) -> "PointCloud":
        """Cloud restricted to the given indices, normals carried along"""
        indices = np.asarray(indices, dtype=np.int64)
        normals = self.gt_normals[indices] if self.has_normals else None
        return PointCloud(self.points[indices], normals, name or self.name)

    def with_points(self, points: np.ndarray, name: str = None) -> "PointCloud":
        """Same normals, new positions"""
        return PointCloud(points, self.gt_normals, name or self.name)


def bounding_box_diagonal(cloud: PointCloud) -> float:
    """Length of the axis-aligned bounding box diagonal"""
    extent = cloud.points.max(axis=0) - cloud.points.min(axis=0)
    return float(np.linalg.norm(extent))
