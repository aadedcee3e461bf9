"""
Quaternion Spatial Transformer
Location: jetnormals/network/qst.py

A small PointNet predicts a 4-vector per patch; adding the identity
quaternion and normalizing gives the rotation that moves the patch into a
learned canonical pose. A near-zero 4-vector falls back to the identity.
"""

import logging
from typing import Sequence, Tuple

import torch
import torch.nn as nn

from network.layers import DTYPE, max_pool, point_mlp

logger = logging.getLogger(__name__)

ZERO_QUATERNION_NORM = 1e-12
IDENTITY_QUATERNION = (1.0, 0.0, 0.0, 0.0)


class QSTNet(nn.Module):
    """Point-wise MLP, max pool, then fully connected layers down to 4 outputs"""

    def __init__(self, point_widths: Sequence[int] = (64, 128, 256), head_widths: Sequence[int] = (128, 64)):
        super().__init__()
        self.point_mlp = point_mlp(3, point_widths)
        self.head = point_mlp(point_widths[-1], tuple(head_widths) + (4,), final_activation=False)

    @property
    def output_layer(self) -> nn.Linear:
        return self.head[-1]

    def forward(self, points: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """(..., r, 3) -> raw 4-vector (..., 4) and pooling argmax"""
        pooled, argmax = max_pool(self.point_mlp(points))
        return self.head(pooled), argmax


def normalize_quaternion(raw: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
    """raw + identity, normalized; entries with norm below ZERO_QUATERNION_NORM become identity"""
    identity = torch.tensor(IDENTITY_QUATERNION, dtype=raw.dtype, device=raw.device)
    quaternion = raw + identity
    norm = torch.linalg.vector_norm(quaternion, dim=-1, keepdim=True)
    fallback = norm < ZERO_QUATERNION_NORM
    safe_norm = torch.where(fallback, torch.ones_like(norm), norm)
    unit = torch.where(fallback, identity.expand_as(quaternion), quaternion / safe_norm)
    if bool(fallback.any()):
        logger.debug(f"QST quaternion vanished for {int(fallback.sum())} patches, using identity")
    return unit, fallback.squeeze(-1)


def quaternion_to_rotation(quaternion: torch.Tensor) -> torch.Tensor:
    """Rotation matrix (..., 3, 3) of unit quaternions (w, x, y, z)"""
    w, x, y, z = quaternion.unbind(-1)
    rows = (
        (1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)),
    )
    return torch.stack([torch.stack(row, dim=-1) for row in rows], dim=-2)


def rotate_points(points: torch.Tensor, rotation: torch.Tensor) -> torch.Tensor:
    """p -> A p for every point of (..., r, 3)"""
    return points @ rotation.transpose(-1, -2)


def qst_forward(params, points) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Rotate a patch (r, 3) or batch (B, r, 3) into the learned canonical pose"""
    points = torch.as_tensor(points, dtype=DTYPE)
    raw, _ = params.qst(points)
    quaternion, _ = normalize_quaternion(raw)
    rotation = quaternion_to_rotation(quaternion)
    return rotate_points(points, rotation), quaternion, rotation
