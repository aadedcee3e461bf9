"""
Synthetic Data Package
Location: jetnormals/synthetic/__init__.py

Analytic shapes with ground-truth normals, benchmark-style augmentations
and the corpora built from them.
"""

from .augment import AugmentSpec, NOISE_LEVELS, add_gaussian_noise, apply_density, augment
from .corpus import (
    CorpusManifest,
    TrainingSample,
    make_sample,
    random_patches,
    random_shape_spec,
    sample_training_patches,
    sharp_feature_corpus,
    write_corpus,
)
from .shapes import ShapeSpec, crease_distance, dihedral_frame, gen_shape

__all__ = [
    'AugmentSpec', 'NOISE_LEVELS', 'add_gaussian_noise', 'apply_density', 'augment',
    'CorpusManifest', 'TrainingSample', 'make_sample', 'random_patches', 'random_shape_spec',
    'sample_training_patches',
    'sharp_feature_corpus', 'write_corpus',
    'ShapeSpec', 'crease_distance', 'dihedral_frame', 'gen_shape',
]
