"""
Top-k Selection
Location: jetnormals/network/selection.py

Keeps the k points with the largest learned weights. The sort is stable,
so equal weights keep ascending point order. Selected weights are gathered
from the weight tensor, so gradients reach only the k kept entries.
"""

from dataclasses import dataclass

import torch

from network.features import WeightVector
from network.layers import DTYPE
from utils.validators import require_int_range


@dataclass(eq=False)
class Selection:
    """Kept patch-point indices and their weights, by descending weight"""
    k: int
    indices: torch.Tensor
    weights: torch.Tensor

    def index_list(self):
        return self.indices.detach().cpu().numpy().tolist()


def top_k_select(weights, k: int, force_center: bool = False) -> Selection:
    """
    Select the k largest of (..., r) weights.

    With force_center, point 0 (the query point) replaces the last kept
    entry when it would otherwise be dropped.
    """
    values = weights.values if isinstance(weights, WeightVector) else torch.as_tensor(weights, dtype=DTYPE)
    k = require_int_range("k", k, 1, values.shape[-1])

    order = torch.sort(values.detach(), dim=-1, descending=True, stable=True).indices
    indices = order[..., :k]
    if force_center:
        has_center = (indices == 0).any(dim=-1, keepdim=True)
        forced = torch.cat((indices[..., :-1], torch.zeros_like(indices[..., -1:])), dim=-1)
        indices = torch.where(has_center, indices, forced)

    return Selection(k=k, indices=indices, weights=torch.gather(values, -1, indices))


def gather_points(points: torch.Tensor, indices: torch.Tensor) -> torch.Tensor:
    """(..., r, D) rows picked by (..., k) indices"""
    expanded = indices.unsqueeze(-1).expand(*indices.shape, points.shape[-1])
    return torch.gather(points, -2, expanded)
