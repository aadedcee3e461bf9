"""
Patch Extraction
Location: jetnormals/geometry/patches.py

Gathers the r nearest neighbors of a query point, moves the query point to
the origin, scales the farthest neighbor to unit distance and rotates the
patch into its PCA frame (smallest-variance axis along local z). The
inverse transform is kept so estimated normals can be mapped back.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from geometry.neighbors import NeighborIndex, query_knn
from geometry.point_cloud import PointCloud
from utils.exceptions import DegeneratePatchError, InvalidInputError
from utils.validators import require_int_range

logger = logging.getLogger(__name__)

# Smallest admissible ratio between the second and first covariance eigenvalue
RANK_TOLERANCE = 1e-12
# Dot products at or below this magnitude count as sign ties
SIGN_TIE_TOLERANCE = 1e-12


@dataclass(eq=False)
class Patch:
    """One query point's normalized, PCA-aligned neighborhood"""
    center_index: int
    neighbor_indices: np.ndarray
    local_points: np.ndarray
    to_world_rotation: np.ndarray
    scale: float
    translation: np.ndarray

    @property
    def size(self) -> int:
        return len(self.local_points)

    def to_world(self, local_points: np.ndarray) -> np.ndarray:
        """Map local coordinates back to the cloud's frame"""
        return self.translation + self.scale * (np.asarray(local_points) @ self.to_world_rotation.T)

    def direction_to_world(self, vector: np.ndarray) -> np.ndarray:
        """Rotate a local direction (normals are scale-free) into the cloud's frame"""
        return self.to_world_rotation @ np.asarray(vector, dtype=np.float64)

    def direction_to_local(self, vector: np.ndarray) -> np.ndarray:
        return self.to_world_rotation.T @ np.asarray(vector, dtype=np.float64)


def _orient(vector: np.ndarray, axes: Tuple[int, ...]) -> np.ndarray:
    """Flip so the first non-tied reference axis has a nonnegative component"""
    for axis in axes:
        component = vector[axis]
        if abs(component) > SIGN_TIE_TOLERANCE:
            return vector if component > 0 else -vector
    return vector


def pca_align(points) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rotate points into their principal frame.

    Columns of the returned rotation are covariance eigenvectors by
    descending eigenvalue. The third is oriented toward +z (ties: +y, +x),
    the first toward +x (ties: +y, +z) and the second is their cross
    product, so the rotation is proper. Aligned points are points @ R.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3:
        raise InvalidInputError(f"expected shape (r, 3), got {points.shape}", "points")
    if len(points) < 3:
        raise DegeneratePatchError(f"PCA alignment needs at least 3 points, got {len(points)}")

    centered = points - points.mean(axis=0)
    covariance = centered.T @ centered / len(points)
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    if eigenvalues[0] <= 0.0 or eigenvalues[1] <= RANK_TOLERANCE * eigenvalues[0]:
        raise DegeneratePatchError("patch points are coincident or collinear")

    normal_axis = _orient(eigenvectors[:, 2], (2, 1, 0))
    first_axis = _orient(eigenvectors[:, 0], (0, 1, 2))
    second_axis = np.cross(normal_axis, first_axis)

    rotation = np.column_stack((first_axis, second_axis, normal_axis))
    return points @ rotation, rotation


def extract_patch(cloud: PointCloud, index: NeighborIndex, center: int, r: int) -> Patch:
    """Build the normalized, aligned patch of r neighbors around one point"""
    require_int_range("r", r, 3, len(cloud))
    neighbors = query_knn(index, center, r)
    world = cloud.points[neighbors]

    translation = world[0].copy()
    centered = world - translation
    scale = float(np.max(np.linalg.norm(centered, axis=1)))
    if scale == 0.0:
        raise DegeneratePatchError(
            f"all {r} neighbors of point {center} coincide with it", center_index=int(center))

    try:
        local, rotation = pca_align(centered / scale)
    except DegeneratePatchError as e:
        raise DegeneratePatchError(f"point {center}: {e.message}", center_index=int(center))

    return Patch(
        center_index=int(center),
        neighbor_indices=neighbors,
        local_points=local,
        to_world_rotation=rotation,
        scale=scale,
        translation=translation,
    )
