"""
Synthetic Corpora
Location: jetnormals/synthetic/corpus.py

Desk-scale stand-ins for the benchmark dataset: a directory of shapes in
the benchmark's file layout (train/test shape lists, category-tagged file
stems and fixed evaluation subsets), plus in-memory sampling of training
patches with their ground-truth normals in the patch frame.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from evaluation.evaluator import DEFAULT_SUBSET_SIZE, category_suffix, select_subset
from geometry.neighbors import build_knn_index
from geometry.patches import Patch, extract_patch
from geometry.point_cloud import PointCloud
from storage.point_files import write_indices, write_normals, write_points, write_stem_list
from synthetic.augment import NOISE_LEVELS, AugmentSpec, augment
from synthetic.shapes import ShapeSpec, crease_distance, gen_shape
from utils.exceptions import DegeneratePatchError, InvalidInputError
from utils.helpers import derive_rng, derive_seed, STREAM_PATCHES, STREAM_SUBSET
from utils.validators import require_int_range

logger = logging.getLogger(__name__)

SHAPE_CYCLE = ("quadric", "dihedral", "sphere")
TRAIN_NOISE_LEVELS = (0.0,) + NOISE_LEVELS
TEST_VARIANTS = (
    (0.0, "none"),
    (NOISE_LEVELS[0], "none"),
    (NOISE_LEVELS[1], "none"),
    (NOISE_LEVELS[2], "none"),
    (0.0, "gradient"),
    (0.0, "stripes"),
)


@dataclass
class CorpusManifest:
    """Stems written by write_corpus, relative to its directory"""
    directory: Path
    train_stems: List[str] = field(default_factory=list)
    test_stems: List[str] = field(default_factory=list)


@dataclass(eq=False)
class TrainingSample:
    """One training patch with ground truth expressed in the patch frame"""
    patch: Patch
    gt_normal: np.ndarray
    neighbor_normals: Optional[np.ndarray] = None
    source: str = ""

    @property
    def points(self) -> np.ndarray:
        return self.patch.local_points


def random_shape_spec(index: int, rng: np.random.Generator, count: int) -> ShapeSpec:
    """Shape kinds cycle; quadric coefficients and dihedral angles are random"""
    kind = SHAPE_CYCLE[index % len(SHAPE_CYCLE)]
    seed = int(rng.integers(0, 2 ** 31 - 1))
    if kind == "quadric":
        beta = np.concatenate(([0.0, 0.0, 0.0], rng.uniform(-1.0, 1.0, size=3), rng.uniform(-0.3, 0.3, size=4)))
        return ShapeSpec("quadric", tuple(beta), count, seed)
    if kind == "dihedral":
        return ShapeSpec("dihedral", (float(rng.uniform(60.0, 150.0)),), count, seed)
    return ShapeSpec("sphere", (1.0,), count, seed)


def write_corpus(directory, train_shapes: int = 8, test_shapes: int = 4, count: int = 10000,
                 seed: int = 0, subset_size: int = DEFAULT_SUBSET_SIZE) -> CorpusManifest:
    """
    Generate and write a corpus.

    Every training shape is written at each training noise level; every test
    shape at each test category (clean, three noise levels, two density
    modes). Test stems get a fixed evaluation subset in a .idx file.
    """
    require_int_range("train_shapes", train_shapes, minimum=1)
    require_int_range("test_shapes", test_shapes, minimum=1)
    directory = Path(directory)
    manifest = CorpusManifest(directory=directory)
    rng = derive_rng(seed, STREAM_PATCHES)

    base_specs = [random_shape_spec(i, rng, count) for i in range(train_shapes + test_shapes)]
    for position, spec in enumerate(base_specs):
        base_name = f"shape{position:02d}_{spec.kind}"
        clean = gen_shape(spec)
        is_train = position < train_shapes
        variants = [(sigma, "none") for sigma in TRAIN_NOISE_LEVELS] if is_train else TEST_VARIANTS

        for variant, (sigma, density) in enumerate(variants):
            stem = base_name + category_suffix(sigma, density)
            variant_seed = derive_seed(spec.seed, variant)
            cloud = augment(clean, AugmentSpec(sigma, density, variant_seed))
            write_points(directory / f"{stem}.xyz", cloud.points)
            write_normals(directory / f"{stem}.normals", cloud.gt_normals)
            if is_train:
                manifest.train_stems.append(stem)
            else:
                subset = select_subset(len(cloud), subset_size, derive_seed(seed, STREAM_SUBSET))
                write_indices(directory / f"{stem}.idx", subset)
                manifest.test_stems.append(stem)

    write_stem_list(directory / "trainset.txt", manifest.train_stems)
    write_stem_list(directory / "testset.txt", manifest.test_stems)
    logger.info(f"Wrote corpus to {directory}: {len(manifest.train_stems)} training, "
                f"{len(manifest.test_stems)} test clouds")
    return manifest


def make_sample(cloud: PointCloud, center: int, r: int, index=None) -> TrainingSample:
    """Extract one patch and move the cloud's ground truth into its frame"""
    if not cloud.has_normals:
        raise InvalidInputError(f"cloud {cloud.name} has no ground-truth normals", "cloud")
    if index is None:
        index = build_knn_index(cloud)
    patch = extract_patch(cloud, index, center, r)
    rotation = patch.to_world_rotation
    return TrainingSample(
        patch=patch,
        gt_normal=rotation.T @ cloud.gt_normals[center],
        neighbor_normals=cloud.gt_normals[patch.neighbor_indices] @ rotation,
        source=cloud.name,
    )


def sample_training_patches(clouds: Sequence[PointCloud], r: int, per_shape: int, seed: int,
                            centers_from=None) -> List[TrainingSample]:
    """
    Draw per_shape random patch centers from each cloud.

    centers_from, when given, maps a cloud to the candidate center indices
    (for example points near a crease). Degenerate patches are skipped.
    """
    require_int_range("per_shape", per_shape, minimum=1)
    rng = derive_rng(seed, STREAM_PATCHES)
    samples: List[TrainingSample] = []

    for cloud in clouds:
        require_int_range("r", r, 3, len(cloud))
        candidates = np.arange(len(cloud)) if centers_from is None else np.asarray(centers_from(cloud))
        if len(candidates) == 0:
            logger.warning(f"No patch centers available in {cloud.name}")
            continue
        index = build_knn_index(cloud)
        chosen = rng.choice(candidates, size=min(per_shape, len(candidates)), replace=False)
        for center in np.sort(chosen):
            try:
                samples.append(make_sample(cloud, int(center), r, index))
            except DegeneratePatchError as e:
                logger.debug(f"Skipping patch: {e.message}")

    logger.info(f"Sampled {len(samples)} training patches from {len(clouds)} clouds")
    return samples


def sharp_feature_corpus(train_patches: int = 2000, test_patches: int = 500, r: int = 128,
                         count: int = 10000, seed: int = 0,
                         sharp_band: float = 0.15) -> Tuple[List[TrainingSample], List[TrainingSample]]:
    """
    Quadric and dihedral training patches (clean and noisy) plus held-out
    dihedral patches centered near the crease.
    """
    rng = derive_rng(seed, STREAM_PATCHES)
    train_clouds: List[PointCloud] = []
    for i in range(8):
        # quadric, quadric, dihedral, dihedral, ... alternating clean and noisy
        spec = random_shape_spec((i // 2) % 2, rng, count)
        sigma = 0.01 if i % 2 else 0.0
        train_clouds.append(augment(gen_shape(spec), AugmentSpec(sigma, "none", spec.seed)))

    test_clouds = [
        gen_shape(ShapeSpec("dihedral", (float(rng.uniform(60.0, 150.0)),), count, int(rng.integers(0, 2 ** 31 - 1))))
        for _ in range(4)
    ]

    def near_crease(cloud: PointCloud) -> np.ndarray:
        return np.flatnonzero(crease_distance(cloud.points) < sharp_band)

    per_train = int(np.ceil(train_patches / len(train_clouds)))
    per_test = int(np.ceil(test_patches / len(test_clouds)))
    train = sample_training_patches(train_clouds, r, per_train, seed)[:train_patches]
    test = sample_training_patches(test_clouds, r, per_test, derive_seed(seed, 1), near_crease)[:test_patches]
    return train, test


def random_patches(n_patches: int, r: int, seed: int = 0, count: int = 2000) -> List[TrainingSample]:
    """A few clean quadric, dihedral and sphere clouds cut into n_patches random patches"""
    require_int_range("n_patches", n_patches, minimum=1)
    rng = derive_rng(seed, STREAM_PATCHES)
    clouds = [gen_shape(random_shape_spec(i, rng, count)) for i in range(len(SHAPE_CYCLE))]
    per_shape = int(np.ceil(n_patches / len(clouds)))
    return sample_training_patches(clouds, r, per_shape, seed)[:n_patches]
