"""
Cloud Augmentations
Location: jetnormals/synthetic/augment.py

Position noise relative to the bounding box diagonal and non-uniform
subsampling along x, the two corruption families the benchmark categories
are built from.
"""

import logging
from dataclasses import dataclass

import numpy as np

from config.settings import DENSITY_MODES
from geometry.point_cloud import PointCloud, bounding_box_diagonal
from utils.helpers import derive_seed
from utils.validators import require_choice, require_int_range, require_real_range

logger = logging.getLogger(__name__)

MAX_NOISE_SIGMA = 0.05
STRIPE_BANDS = 10
STRIPE_KEEP = (1.0, 0.1)
GRADIENT_KEEP_RANGE = (0.1, 1.0)

# Benchmark noise levels (fractions of the bounding box diagonal)
NOISE_LEVELS = (0.00125, 0.006, 0.012)


@dataclass
class AugmentSpec:
    """Noise level and density mode of one augmented variant"""
    noise_sigma_rel: float = 0.0
    density_mode: str = "none"
    seed: int = 0

    def __post_init__(self):
        self.noise_sigma_rel = require_real_range("noise_sigma_rel", self.noise_sigma_rel, 0.0, MAX_NOISE_SIGMA)
        require_choice("density_mode", self.density_mode, DENSITY_MODES)
        require_int_range("seed", self.seed, minimum=0)


def add_gaussian_noise(cloud: PointCloud, sigma_rel: float, seed: int) -> PointCloud:
    """Perturb every coordinate by N(0, (sigma_rel * diag)^2); normals carried over"""
    sigma_rel = require_real_range("sigma_rel", sigma_rel, 0.0)
    if sigma_rel == 0.0:
        return cloud
    sigma = sigma_rel * bounding_box_diagonal(cloud)
    rng = np.random.default_rng(seed)
    noisy = cloud.points + rng.normal(0.0, sigma, size=cloud.points.shape)
    return cloud.with_points(noisy)


def keep_probability(points: np.ndarray, mode: str) -> np.ndarray:
    """Per-point keep probability of a density mode along the x extent"""
    x = points[:, 0]
    extent = float(x.max() - x.min())
    u = (x - x.min()) / extent if extent > 0 else np.zeros_like(x)

    if mode == "gradient":
        # linear from 1.0 at the first decile's center to 0.1 at the last one's
        low, high = GRADIENT_KEEP_RANGE
        return np.clip(high + (low - high) * (u - 0.05) / 0.9, low, high)
    if mode == "stripes":
        band = np.minimum((u * STRIPE_BANDS).astype(np.int64), STRIPE_BANDS - 1)
        return np.where(band % 2 == 0, STRIPE_KEEP[0], STRIPE_KEEP[1])
    return np.ones_like(x)


def apply_density(cloud: PointCloud, mode: str, seed: int) -> PointCloud:
    """Subsample by keep probability; never adds points"""
    require_choice("mode", mode, DENSITY_MODES)
    if mode == "none":
        return cloud
    probability = keep_probability(cloud.points, mode)
    rng = np.random.default_rng(seed)
    kept = np.flatnonzero(rng.random(len(cloud)) < probability)
    logger.debug(f"Density '{mode}' kept {len(kept)} of {len(cloud)} points of {cloud.name}")
    return cloud.subset(kept)


def augment(cloud: PointCloud, spec: AugmentSpec) -> PointCloud:
    """Noise first, then density subsampling, with independent seed streams"""
    noisy = add_gaussian_noise(cloud, spec.noise_sigma_rel, derive_seed(spec.seed, 0))
    return apply_density(noisy, spec.density_mode, derive_seed(spec.seed, 1))
