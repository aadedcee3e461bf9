"""
Geometry Package Initialization
Location: jetnormals/geometry/__init__.py

Point-cloud containers, exact kNN search, patch normalization and PCA
alignment that feed every estimator.
"""

from .point_cloud import PointCloud, bounding_box_diagonal
from .neighbors import NeighborIndex, build_knn_index, query_knn
from .patches import Patch, extract_patch, pca_align

__all__ = [
    'PointCloud',
    'bounding_box_diagonal',
    'NeighborIndex',
    'build_knn_index',
    'query_knn',
    'Patch',
    'extract_patch',
    'pca_align'
]
