"""
Nearest Neighbor Search
Location: jetnormals/geometry/neighbors.py

Exact k-nearest-neighbor queries over a point cloud. A k-d tree proposes
candidates; final ordering is decided on exactly recomputed squared
distances so results match a brute-force scan, including the tie rule.
"""

import logging

import numpy as np
from scipy.spatial import cKDTree

from geometry.point_cloud import PointCloud
from utils.exceptions import InvalidInputError
from utils.validators import require_int_range

logger = logging.getLogger(__name__)

# Relative slack on the candidate ball so rounding in the tree never drops a tie
_RADIUS_SLACK = 1e-9


class NeighborIndex:
    """Spatial acceleration structure over a cloud's points (read-only after construction)"""

    def __init__(self, points: np.ndarray):
        self.points = points
        self.tree = cKDTree(points)

    def __len__(self) -> int:
        return len(self.points)

    def squared_distances(self, query_index: int, candidates: np.ndarray) -> np.ndarray:
        """Squared Euclidean distances from one indexed point to candidate points"""
        diff = self.points[candidates] - self.points[query_index]
        return np.sum(diff * diff, axis=1)


def build_knn_index(cloud: PointCloud) -> NeighborIndex:
    """Build the neighbor index of a non-empty cloud"""
    if cloud is None or len(cloud) == 0:
        raise InvalidInputError("cannot index an empty cloud", "cloud")
    logger.debug(f"Building k-d tree over {len(cloud)} points of {cloud.name}")
    return NeighborIndex(cloud.points)


def query_knn(index: NeighborIndex, query_index: int, r: int) -> np.ndarray:
    """
    The r nearest points to an indexed point.

    The query point comes first; the rest follow by ascending distance with
    distance ties broken by ascending point index.
    """
    n_points = len(index)
    query_index = require_int_range("query_index", query_index, 0, n_points - 1)
    r = require_int_range("r", r, 1, n_points)
    if r == 1:
        return np.array([query_index], dtype=np.int64)

    query = index.points[query_index]
    distances, _ = index.tree.query(query, k=r)
    radius = float(np.max(distances))
    radius = radius * (1.0 + _RADIUS_SLACK) + 1e-300
    candidates = np.asarray(index.tree.query_ball_point(query, radius), dtype=np.int64)
    candidates = candidates[candidates != query_index]

    d2 = index.squared_distances(query_index, candidates)
    order = np.lexsort((candidates, d2))
    chosen = candidates[order[:r - 1]]
    return np.concatenate(([query_index], chosen)).astype(np.int64)
