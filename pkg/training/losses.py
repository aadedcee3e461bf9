"""
Training Losses
Location: jetnormals/training/losses.py

    L_center    = |N_gt x N_est|
    L_neighbors = (1/k) [ -sum log w_j + sum w_j |N_gt x N_j| ]
    L_reg       = |I - A A^T|_F
    L_total     = L_center + alpha1 L_neighbors + alpha2 L_reg

Every function accepts leading batch dimensions and returns one value per
batch entry.
"""

from dataclasses import dataclass

import torch

from network.features import WEIGHT_MAX, WEIGHT_MIN
from network.layers import DTYPE

# Norms whose square falls below this are treated as exactly zero
_ZERO_SQUARED_NORM = 1e-30


def safe_norm(vectors: torch.Tensor, dim=-1) -> torch.Tensor:
    """Euclidean norm with a zero gradient at the origin; non-finite input stays non-finite"""
    squared = torch.sum(vectors * vectors, dim=dim)
    nonzero = ~(squared <= _ZERO_SQUARED_NORM)  # NaN stays NaN
    return torch.where(nonzero, torch.sqrt(torch.where(nonzero, squared, torch.ones_like(squared))),
                       torch.zeros_like(squared))


def _unit(vectors: torch.Tensor) -> torch.Tensor:
    vectors = torch.as_tensor(vectors, dtype=DTYPE)
    norm = safe_norm(vectors).unsqueeze(-1)
    return vectors / torch.where(norm == 0, torch.ones_like(norm), norm)


def sine_distance(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """|a x b| of unit-normalized inputs: sine of the angle, blind to sign"""
    return safe_norm(torch.cross(_unit(a), _unit(b), dim=-1))


def loss_center(estimated: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    return sine_distance(gt, estimated)


def loss_neighbors(selected_weights: torch.Tensor, gt: torch.Tensor, neighbor_normals: torch.Tensor) -> torch.Tensor:
    """
    Selected weights (..., k), the center's ground truth (..., 3) or one
    ground truth per neighbor (..., k, 3), and jet normals (..., k, 3).
    """
    weights = torch.as_tensor(selected_weights, dtype=DTYPE).clamp(WEIGHT_MIN, WEIGHT_MAX)
    gt = torch.as_tensor(gt, dtype=DTYPE)
    if gt.dim() == neighbor_normals.dim() - 1:
        gt = gt.unsqueeze(-2)
    deviation = sine_distance(gt, neighbor_normals)
    return torch.mean(-torch.log(weights) + weights * deviation, dim=-1)


def loss_reg(rotation: torch.Tensor) -> torch.Tensor:
    rotation = torch.as_tensor(rotation, dtype=DTYPE)
    identity = torch.eye(3, dtype=DTYPE)
    residual = identity - rotation @ rotation.transpose(-1, -2)
    return safe_norm(residual.flatten(start_dim=-2))


@dataclass
class LossParts:
    center: torch.Tensor
    neighbors: torch.Tensor
    reg: torch.Tensor


def loss_total(parts: LossParts, alpha1: float, alpha2: float) -> torch.Tensor:
    return parts.center + alpha1 * parts.neighbors + alpha2 * parts.reg


def pipeline_losses(tape, gt_local: torch.Tensor, neighbor_gt_local: torch.Tensor = None) -> LossParts:
    """
    Loss parts of a recorded pass. Ground truth comes in the patch frame;
    the neighbor term compares in the canonical frame, against the center's
    ground truth or, when given, each selected point's own.
    """
    gt_local = torch.as_tensor(gt_local, dtype=DTYPE)
    if neighbor_gt_local is None:
        neighbor_target = tape.to_canonical(gt_local)
    else:
        neighbor_gt_local = torch.as_tensor(neighbor_gt_local, dtype=DTYPE)
        index = tape.selection.indices.unsqueeze(-1).expand(*tape.selection.indices.shape, 3)
        neighbor_target = tape.to_canonical(torch.gather(neighbor_gt_local, -2, index))

    return LossParts(
        center=loss_center(tape.normal_local, gt_local),
        neighbors=loss_neighbors(tape.selection.weights, neighbor_target, tape.neighbor_normals()),
        reg=loss_reg(tape.rotation),
    )
