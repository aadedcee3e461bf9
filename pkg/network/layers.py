"""
Network Building Blocks
Location: jetnormals/network/layers.py

Point-wise MLPs (the same affine layers applied to every point of a patch)
with softplus activations, and the fan-in scaled initializers shared by
every subnetwork. Everything runs in float64.
"""

import math
from typing import Optional, Sequence

import torch
import torch.nn as nn

DTYPE = torch.float64


def point_mlp(in_features: int, widths: Sequence[int], final_activation: bool = True) -> nn.Sequential:
    """Linear layers of the given widths with softplus between them"""
    layers = []
    previous = in_features
    for position, width in enumerate(widths):
        layers.append(nn.Linear(previous, width, dtype=DTYPE))
        if final_activation or position < len(widths) - 1:
            layers.append(nn.Softplus())
        previous = width
    return nn.Sequential(*layers)


def linear_layers(module: nn.Module):
    return [m for m in module.modules() if isinstance(m, nn.Linear)]


def he_uniform_(layer: nn.Linear, generator: torch.Generator):
    """Uniform in +-sqrt(6 / fan_in) for weights, zero biases"""
    bound = math.sqrt(6.0 / layer.in_features)
    with torch.no_grad():
        layer.weight.copy_(torch.rand(layer.weight.shape, generator=generator, dtype=DTYPE) * 2 * bound - bound)
        layer.bias.zero_()


def uniform_bias_(layer: nn.Linear, generator: torch.Generator, scale: Optional[float] = None):
    """Small uniform biases (used when randomizing a whole network)"""
    scale = scale if scale is not None else 1.0 / math.sqrt(layer.in_features)
    with torch.no_grad():
        layer.bias.copy_(torch.rand(layer.bias.shape, generator=generator, dtype=DTYPE) * 2 * scale - scale)


def zero_(layer: nn.Linear):
    with torch.no_grad():
        layer.weight.zero_()
        layer.bias.zero_()


def max_pool(features: torch.Tensor):
    """Coordinate-wise max over the point axis; returns values and argmax indices"""
    pooled = torch.max(features, dim=-2)
    return pooled.values, pooled.indices
