"""
Point Features and Weight Head
Location: jetnormals/network/features.py

Per-point features F from a shared point-wise MLP, the global feature G
as their coordinate-wise max, and the per-point weight
w_j = sigmoid(h(F_j concatenated with G)).
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import torch
import torch.nn as nn

from network.layers import DTYPE, max_pool, point_mlp

WEIGHT_MIN = 1e-5
WEIGHT_MAX = 1.0 - 1e-7


class PointFeatureNet(nn.Module):
    def __init__(self, widths: Sequence[int] = (64, 64, 128, 256)):
        super().__init__()
        self.mlp = point_mlp(3, widths)
        self.out_features = widths[-1]

    def forward(self, points: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        features = self.mlp(points)
        pooled, argmax = max_pool(features)
        return features, pooled, argmax


class WeightHead(nn.Module):
    """MLP h on [F_j, G] producing one logit per point"""

    def __init__(self, in_features: int, widths: Sequence[int] = (128, 64)):
        super().__init__()
        self.mlp = point_mlp(in_features, tuple(widths) + (1,), final_activation=False)

    @property
    def output_layer(self) -> nn.Linear:
        return self.mlp[-1]

    def forward(self, features: torch.Tensor, global_feature: torch.Tensor) -> torch.Tensor:
        expanded = global_feature.unsqueeze(-2).expand(*features.shape[:-1], global_feature.shape[-1])
        return self.mlp(torch.cat((features, expanded), dim=-1)).squeeze(-1)


@dataclass(eq=False)
class WeightVector:
    """Per-point weights in (0, 1) of one patch (or a batch of patches)"""
    values: torch.Tensor
    patch_id: Optional[int] = None

    def clamped(self) -> torch.Tensor:
        return self.values.clamp(WEIGHT_MIN, WEIGHT_MAX)

    def __len__(self) -> int:
        return self.values.shape[-1]


def point_features(params, rotated_points) -> Tuple[torch.Tensor, torch.Tensor]:
    """F (..., r, C) and G (..., C); G does not depend on point order"""
    features, pooled, _ = params.features(torch.as_tensor(rotated_points, dtype=DTYPE))
    return features, pooled


def weight_head(params, features: torch.Tensor, global_feature: torch.Tensor,
                patch_id: Optional[int] = None) -> WeightVector:
    return WeightVector(torch.sigmoid(params.weight_head(features, global_feature)), patch_id)
