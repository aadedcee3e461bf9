"""
Network Package
Location: jetnormals/network/__init__.py

The learned components of the estimator and the recorded forward pass
that training differentiates.
"""

from .features import WeightVector, point_features, weight_head
from .params import ModelParams, NetworkConfig, PARAMS_VERSION
from .pipeline import PipelineResult, Tape, backward, forward_pipeline, predict_local_normals, run_batch
from .qst import normalize_quaternion, qst_forward, quaternion_to_rotation
from .selection import Selection, top_k_select
from .update import point_update

__all__ = [
    'WeightVector', 'point_features', 'weight_head',
    'ModelParams', 'NetworkConfig', 'PARAMS_VERSION',
    'PipelineResult', 'Tape', 'backward', 'forward_pipeline', 'predict_local_normals', 'run_batch',
    'normalize_quaternion', 'qst_forward', 'quaternion_to_rotation',
    'Selection', 'top_k_select', 'point_update',
]
