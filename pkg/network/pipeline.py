"""
Learned Normal Pipeline
Location: jetnormals/network/pipeline.py

QST -> point features -> weight head -> top-k selection -> point update
(on the selected points) -> weighted jet fit -> normal, rotated back
through the QST rotation and the patch frame. One forward pass over a
batch of patches is recorded on a Tape, from which gradients of any
scalar built from its tensors can be extracted.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import torch

from fitting.differentiable import neighbor_normals_tensor, normal_from_beta_tensor, weighted_jet_fit
from fitting.jets import JetModel, jet_term_count
from geometry.patches import Patch
from network.features import WeightVector
from network.layers import DTYPE
from network.params import ModelParams
from network.qst import normalize_quaternion, quaternion_to_rotation, rotate_points
from network.selection import Selection, gather_points, top_k_select
from network.update import point_update
from utils.exceptions import InvalidInputError, UnderdeterminedSystemError

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 64


@dataclass(eq=False)
class Tape:
    """Tensors of one recorded forward pass over (B, r) patches"""
    params: ModelParams
    inputs: torch.Tensor
    quaternion: torch.Tensor
    rotation: torch.Tensor
    qst_fallback: torch.Tensor
    rotated: torch.Tensor
    weights: WeightVector
    selection: Selection
    updated: torch.Tensor
    update_neighbors: Optional[torch.Tensor]
    beta: torch.Tensor
    ridge: torch.Tensor
    normal_canonical: torch.Tensor
    normal_local: torch.Tensor
    pool_argmax: Tuple[torch.Tensor, torch.Tensor]
    order: int

    @property
    def batch_size(self) -> int:
        return self.inputs.shape[0]

    def neighbor_normals(self) -> torch.Tensor:
        """Jet normals at the fitted points' (x, y), canonical frame, (B, k, 3)"""
        return neighbor_normals_tensor(self.beta, self.updated[..., :2], self.order)

    def to_canonical(self, local_vectors: torch.Tensor) -> torch.Tensor:
        """Patch-frame vectors (B, ..., 3) rotated into each patch's canonical frame"""
        local_vectors = torch.as_tensor(local_vectors, dtype=DTYPE)
        rotation = self.rotation.reshape(self.batch_size, *([1] * (local_vectors.dim() - 2)), 3, 3)
        return (rotation @ local_vectors.unsqueeze(-1)).squeeze(-1)

    def branch_signature(self) -> Tuple[bytes, ...]:
        """Every discrete decision of the pass; equal signatures mean the same smooth branch"""
        parts = [self.selection.indices, *self.pool_argmax, self.ridge, self.qst_fallback]
        if self.update_neighbors is not None:
            parts.append(self.update_neighbors)
        return tuple(part.detach().cpu().numpy().tobytes() for part in parts)


@dataclass(eq=False)
class PipelineResult:
    """forward_pipeline output for one patch"""
    normal: np.ndarray
    selection: Selection
    updated_points: np.ndarray
    jet: JetModel
    tape: Tape


def fit_from_selection(params: ModelParams, rotated: torch.Tensor, selection: Selection, n: int,
                       m: Optional[int], use_update: bool):
    """Point update on the selected points, then the weighted jet fit"""
    selected = gather_points(rotated, selection.indices)
    neighbors = None
    if use_update:
        selected, neighbors = point_update(params, selected, m)
    beta, ridge = weighted_jet_fit(selected, selection.weights, n)
    return selected, neighbors, beta, ridge


def run_batch(params: ModelParams, points, k: Optional[int] = None, n: Optional[int] = None,
              m: Optional[int] = None) -> Tape:
    """Forward pass over (B, r, 3) patch-frame points"""
    config = params.config
    if isinstance(points, torch.Tensor):
        points = points.to(DTYPE)
    else:
        points = torch.tensor(np.array(points, dtype=np.float64))
    if points.dim() != 3 or points.shape[-1] != 3:
        raise InvalidInputError(f"expected (B, r, 3) patches, got {tuple(points.shape)}", "points")
    r = points.shape[1]
    n = config.order if n is None else n
    m = config.m if m is None else m
    fitted = (config.k if k is None else k) if config.use_topk else r
    if fitted > r:
        raise InvalidInputError(f"cannot select {fitted} of {r} points", "k")
    if fitted < jet_term_count(n):
        raise UnderdeterminedSystemError(required=jet_term_count(n), available=fitted)

    raw, qst_argmax = params.qst(points)
    quaternion, fallback = normalize_quaternion(raw)
    rotation = quaternion_to_rotation(quaternion)
    rotated = rotate_points(points, rotation)

    features, pooled, feature_argmax = params.features(rotated)
    weights = WeightVector(torch.sigmoid(params.weight_head(features, pooled)))
    selection = top_k_select(weights, fitted, force_center=config.force_center)

    updated, neighbors, beta, ridge = fit_from_selection(params, rotated, selection, n, m, config.use_update)
    normal_canonical = normal_from_beta_tensor(beta)
    normal_local = (rotation.transpose(-1, -2) @ normal_canonical.unsqueeze(-1)).squeeze(-1)

    return Tape(
        params=params,
        inputs=points,
        quaternion=quaternion,
        rotation=rotation,
        qst_fallback=fallback,
        rotated=rotated,
        weights=weights,
        selection=selection,
        updated=updated,
        update_neighbors=neighbors,
        beta=beta,
        ridge=ridge,
        normal_canonical=normal_canonical,
        normal_local=normal_local,
        pool_argmax=(qst_argmax, feature_argmax),
        order=n,
    )


def forward_pipeline(params: ModelParams, patch: Patch, k: Optional[int] = None,
                     n: Optional[int] = None) -> PipelineResult:
    """World-frame normal of one patch with everything the pass decided"""
    tape = run_batch(params, patch.local_points[None], k, n)
    single = Selection(k=tape.selection.k, indices=tape.selection.indices[0], weights=tape.selection.weights[0])
    normal_local = tape.normal_local[0].detach().numpy()
    return PipelineResult(
        normal=patch.direction_to_world(normal_local),
        selection=single,
        updated_points=tape.updated[0].detach().numpy().copy(),
        jet=JetModel(order=tape.order, beta=tape.beta[0].detach().numpy()),
        tape=tape,
    )


def backward(tape: Tape, loss: torch.Tensor, seed: float = 1.0) -> Dict[str, torch.Tensor]:
    """
    Reverse-mode gradients of a scalar built from the tape's tensors, for
    every parameter array (zeros where the loss does not depend on it).
    """
    named = list(tape.params.named_parameters())
    if not isinstance(loss, torch.Tensor) or not loss.requires_grad:
        return {name: torch.zeros_like(p) for name, p in named}
    grads = torch.autograd.grad(
        loss,
        [p for _, p in named],
        grad_outputs=torch.as_tensor(seed, dtype=loss.dtype),
        allow_unused=True,
        retain_graph=True,
    )
    return {name: (g if g is not None else torch.zeros_like(p)) for (name, p), g in zip(named, grads)}


def predict_local_normals(params: ModelParams, local_points: np.ndarray,
                          batch_size: int = DEFAULT_BATCH_SIZE) -> np.ndarray:
    """Patch-frame normals of (N, r, 3) patches without recording gradients"""
    local_points = np.asarray(local_points, dtype=np.float64)
    normals = np.empty((len(local_points), 3))
    with torch.no_grad():
        for start in range(0, len(local_points), batch_size):
            tape = run_batch(params, local_points[start:start + batch_size])
            normals[start:start + batch_size] = tape.normal_local.numpy()
    return normals
