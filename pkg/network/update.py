"""
Point-wise Position Update
Location: jetnormals/network/update.py

Each point moves by the mean of its edge vectors to its m nearest
in-patch neighbors, each edge scaled by a learned scalar
R(f(p_s) - f(p_j)) of the feature difference:

    p'_j = p_j + (1/m) sum_s R(f(p_s) - f(p_j)) (p_s - p_j)
"""

from typing import Sequence, Tuple

import torch
import torch.nn as nn

from network.layers import DTYPE, point_mlp
from network.selection import gather_points
from utils.exceptions import InvalidInputError


class UpdateNet(nn.Module):
    """Point feature MLP f and the single affine edge transform R"""

    def __init__(self, widths: Sequence[int] = (32, 32)):
        super().__init__()
        self.f = point_mlp(3, widths)
        self.edge = nn.Linear(widths[-1], 1, dtype=DTYPE)

    @property
    def output_layer(self) -> nn.Linear:
        return self.edge


def patch_neighbors(points: torch.Tensor, m: int) -> torch.Tensor:
    """
    Indices (..., k, m) of each point's m nearest other points in the patch,
    by ascending squared distance with ties broken by ascending index.
    """
    with torch.no_grad():
        diff = points.unsqueeze(-2) - points.unsqueeze(-3)
        distances = torch.sum(diff * diff, dim=-1)
        k = points.shape[-2]
        self_mask = torch.eye(k, dtype=torch.bool, device=points.device)
        distances = distances.masked_fill(self_mask, float("inf"))
        return torch.sort(distances, dim=-1, stable=True).indices[..., :m]


def point_update(params, points, m: int) -> Tuple[torch.Tensor, torch.Tensor]:
    """Updated points and the neighbor indices used, for (..., k, 3) patches"""
    points = torch.as_tensor(points, dtype=DTYPE)
    k = points.shape[-2]
    if isinstance(m, bool) or not isinstance(m, int) or m < 1 or m >= k:
        raise InvalidInputError(f"update neighborhood must satisfy 1 <= m <= {k - 1}, got {m!r}", "m")

    neighbors = patch_neighbors(points, m)
    features = params.update.f(points)

    batch_shape = neighbors.shape[:-2]
    flat = neighbors.reshape(*batch_shape, k * m)
    neighbor_points = gather_points(points, flat).reshape(*batch_shape, k, m, 3)
    neighbor_features = gather_points(features, flat).reshape(*batch_shape, k, m, features.shape[-1])

    edge_scale = params.update.edge(neighbor_features - features.unsqueeze(-2))
    edges = neighbor_points - points.unsqueeze(-2)
    delta = torch.mean(edge_scale * edges, dim=-2)
    return points + delta, neighbors
