"""
Normal Estimators
Location: jetnormals/core/estimators.py

Per-point normal estimation over a whole cloud with one of three methods:
the PCA plane, the classic unweighted n-jet and the learned pipeline.
Query points are split into fixed-size chunks that a thread pool works
on concurrently; results are placed by point index, so the output never
depends on the thread count or on completion order.
"""

import concurrent.futures
import logging
import os
from typing import List, Optional

import numpy as np

from fitting.jets import jet_term_count, ls_fit, normal_from_beta
from geometry.neighbors import NeighborIndex, build_knn_index
from geometry.patches import Patch, extract_patch
from geometry.point_cloud import PointCloud
from network.pipeline import predict_local_normals
from utils.exceptions import InvalidInputError, UnderdeterminedSystemError
from utils.validators import require_choice, require_int_range

CHUNK_SIZE = 256


def resolve_threads(threads: int) -> int:
    """0 means one worker per available CPU"""
    threads = require_int_range("threads", threads, minimum=0)
    return threads or os.cpu_count() or 1


class NormalEstimator:
    """Shared chunked, threaded driver; subclasses estimate one chunk of patches"""

    name = "base"

    def __init__(self, patch_size: int = 256, threads: int = 1):
        self.patch_size = require_int_range("patch_size", patch_size, minimum=3)
        self.threads = resolve_threads(threads)
        self.logger = logging.getLogger(__name__)

    def estimate_patches(self, patches: List[Patch]) -> np.ndarray:
        raise NotImplementedError

    def patch_size_for(self, cloud: PointCloud) -> int:
        if self.patch_size > len(cloud):
            raise InvalidInputError(
                f"patch size {self.patch_size} exceeds the {len(cloud)} points of {cloud.name}", "patch_size")
        return self.patch_size

    def _estimate_chunk(self, cloud: PointCloud, index: NeighborIndex, chunk: np.ndarray, r: int) -> np.ndarray:
        patches = [extract_patch(cloud, index, int(center), r) for center in chunk]
        return self.estimate_patches(patches)

    def estimate(self, cloud: PointCloud, indices=None) -> np.ndarray:
        """World-frame unit normals at the given point indices (all points by default), in index order"""
        if indices is None:
            indices = np.arange(len(cloud), dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        if len(indices) and (indices.min() < 0 or indices.max() >= len(cloud)):
            raise InvalidInputError(f"query indices must lie in [0, {len(cloud) - 1}]", "indices")
        normals = np.empty((len(indices), 3))
        if len(indices) == 0:
            return normals

        r = self.patch_size_for(cloud)
        index = build_knn_index(cloud)
        chunks = [indices[start:start + CHUNK_SIZE] for start in range(0, len(indices), CHUNK_SIZE)]
        self.logger.info(f"Estimating {len(indices)} normals of {cloud.name} with {self.name} "
                         f"(r={r}, {len(chunks)} chunks, {self.threads} threads)")

        if self.threads == 1 or len(chunks) == 1:
            for position, chunk in enumerate(chunks):
                normals[position * CHUNK_SIZE:position * CHUNK_SIZE + len(chunk)] = \
                    self._estimate_chunk(cloud, index, chunk, r)
            return normals

        with concurrent.futures.ThreadPoolExecutor(max_workers=self.threads) as executor:
            futures = {}

            # Submit every chunk
            for position, chunk in enumerate(chunks):
                futures[position] = executor.submit(self._estimate_chunk, cloud, index, chunk, r)

            # Collect results in submission order
            for position, future in futures.items():
                chunk_normals = future.result()
                normals[position * CHUNK_SIZE:position * CHUNK_SIZE + len(chunk_normals)] = chunk_normals

        return normals


class PCAEstimator(NormalEstimator):
    """Smallest-variance axis of the patch covariance"""

    name = "pca"

    def estimate_patches(self, patches: List[Patch]) -> np.ndarray:
        return np.array([patch.to_world_rotation[:, 2] for patch in patches]).reshape(-1, 3)


class JetEstimator(NormalEstimator):
    """Unweighted n-jet through all r patch points"""

    name = "jet"

    def __init__(self, order: int = 3, patch_size: int = 256, threads: int = 1):
        super().__init__(patch_size=patch_size, threads=threads)
        self.order = require_int_range("order", order, 1)

    def estimate_patches(self, patches: List[Patch]) -> np.ndarray:
        normals = np.empty((len(patches), 3))
        for i, patch in enumerate(patches):
            model, diagnostics = ls_fit(patch.local_points, self.order)
            if diagnostics.ridge_applied:
                self.logger.debug(f"Ridge fallback at point {patch.center_index}")
            normals[i] = patch.direction_to_world(normal_from_beta(model))
        return normals


class LearnedEstimator(NormalEstimator):
    """The trained pipeline; patch size, k and order come from the checkpoint"""

    name = "learned"

    def __init__(self, checkpoint, threads: int = 1, batch_size: Optional[int] = None):
        config = checkpoint.network_config
        super().__init__(patch_size=config.patch_size, threads=threads)
        self.checkpoint = checkpoint
        self.batch_size = batch_size or CHUNK_SIZE

    def estimate_patches(self, patches: List[Patch]) -> np.ndarray:
        if not patches:
            return np.empty((0, 3))
        local = np.stack([patch.local_points for patch in patches])
        local_normals = predict_local_normals(self.checkpoint.params, local, batch_size=self.batch_size)
        return np.array([patch.direction_to_world(normal) for patch, normal in zip(patches, local_normals)])


def make_estimator(method: str, order: int = 3, patch_size: int = 256, threads: int = 1,
                   checkpoint=None) -> NormalEstimator:
    """Estimator for a method name"""
    require_choice("method", method, ("pca", "jet", "learned"))
    if method == "pca":
        return PCAEstimator(patch_size=patch_size, threads=threads)
    if method == "jet":
        if patch_size < jet_term_count(order):
            raise UnderdeterminedSystemError(required=jet_term_count(order), available=patch_size)
        return JetEstimator(order=order, patch_size=patch_size, threads=threads)
    if checkpoint is None:
        raise InvalidInputError("the learned method needs a checkpoint", "checkpoint")
    return LearnedEstimator(checkpoint, threads=threads)
