"""
Model Parameters
Location: jetnormals/network/params.py

All trainable arrays of the learned estimator, grouped by subnetwork (QST,
point features, weight head, update net), plus the hyper-parameters that
shape them. A fresh model starts as the classic jet estimator: identity
QST, every weight 0.5 and zero displacement.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np
import torch
import torch.nn as nn

from config.settings import MAX_JET_ORDER
from fitting.jets import jet_term_count
from network.features import PointFeatureNet, WeightHead
from network.layers import DTYPE, he_uniform_, linear_layers, uniform_bias_, zero_
from network.qst import QSTNet
from network.update import UpdateNet
from utils.exceptions import CheckpointError, InvalidInputError
from utils.validators import require_int_range

logger = logging.getLogger(__name__)

PARAMS_VERSION = 1


@dataclass
class NetworkConfig:
    """Architecture and pipeline hyper-parameters stored with every checkpoint"""
    order: int = 3
    k: int = 50
    patch_size: int = 256
    m: int = 8
    use_topk: bool = True
    use_update: bool = True
    force_center: bool = False
    qst_widths: Tuple[int, ...] = (64, 128, 256)
    qst_head_widths: Tuple[int, ...] = (128, 64)
    feature_widths: Tuple[int, ...] = (64, 64, 128, 256)
    head_widths: Tuple[int, ...] = (128, 64)
    update_widths: Tuple[int, ...] = (32, 32)

    def __post_init__(self):
        for name in ("qst_widths", "qst_head_widths", "feature_widths", "head_widths", "update_widths"):
            widths = tuple(int(w) for w in getattr(self, name))
            if not widths or min(widths) < 1:
                raise InvalidInputError(f"layer widths must be positive, got {widths}", name)
            setattr(self, name, widths)
        self.validate()

    @property
    def selected_count(self) -> int:
        """Points reaching the fit: k with top-k selection, the whole patch without"""
        return self.k if self.use_topk else self.patch_size

    def validate(self) -> "NetworkConfig":
        require_int_range("order", self.order, 1, MAX_JET_ORDER)
        require_int_range("patch_size", self.patch_size, minimum=3)
        require_int_range("k", self.k, 1, self.patch_size)
        if self.selected_count < jet_term_count(self.order):
            raise InvalidInputError(
                f"{self.selected_count} fitted points cannot determine {jet_term_count(self.order)} coefficients", "k")
        if self.use_update:
            require_int_range("m", self.m, 1, self.selected_count - 1)
        return self

    def metadata(self) -> Dict[str, str]:
        """Flat text form for checkpoint headers"""
        text = {}
        for key, value in asdict(self).items():
            if isinstance(value, tuple):
                text[key] = ",".join(str(v) for v in value)
            elif isinstance(value, bool):
                text[key] = "true" if value else "false"
            else:
                text[key] = str(value)
        return text

    @classmethod
    def from_metadata(cls, metadata: Dict[str, str]) -> "NetworkConfig":
        defaults = cls.__dataclass_fields__
        values = {}
        for key, text in metadata.items():
            if key not in defaults:
                raise CheckpointError(f"unknown network key '{key}'")
            default = defaults[key].default
            try:
                if isinstance(default, tuple):
                    values[key] = tuple(int(v) for v in text.split(",") if v.strip())
                elif isinstance(default, bool):
                    values[key] = text.strip().lower() == "true"
                else:
                    values[key] = int(text)
            except ValueError:
                raise CheckpointError(f"bad value {text!r} for network key '{key}'")
        try:
            return cls(**values)
        except InvalidInputError as e:
            raise CheckpointError(e.message)


class ModelParams(nn.Module):
    """The learned estimator's subnetworks, all in float64"""

    version = PARAMS_VERSION

    def __init__(self, config: NetworkConfig = None):
        super().__init__()
        self.config = config or NetworkConfig()
        self.qst = QSTNet(self.config.qst_widths, self.config.qst_head_widths)
        self.features = PointFeatureNet(self.config.feature_widths)
        self.weight_head = WeightHead(2 * self.config.feature_widths[-1], self.config.head_widths)
        self.update = UpdateNet(self.config.update_widths)
        self.to(DTYPE)

    def initialize(self, seed: int) -> "ModelParams":
        """He-uniform hidden layers; zero QST, weight-head and edge output layers"""
        generator = torch.Generator().manual_seed(int(seed))
        for layer in linear_layers(self):
            he_uniform_(layer, generator)
        for layer in (self.qst.output_layer, self.weight_head.output_layer, self.update.output_layer):
            zero_(layer)
        return self

    def randomize(self, seed: int, output_scale: float = 0.1) -> "ModelParams":
        """
        Every layer random, output layers included (scaled down), so every
        array carries gradient. Used for gradient checks.
        """
        generator = torch.Generator().manual_seed(int(seed))
        for layer in linear_layers(self):
            he_uniform_(layer, generator)
            uniform_bias_(layer, generator)
        with torch.no_grad():
            for layer in (self.qst.output_layer, self.weight_head.output_layer, self.update.output_layer):
                layer.weight.mul_(output_scale)
                layer.bias.mul_(output_scale)
        return self

    def named_arrays(self) -> Dict[str, np.ndarray]:
        """Copies of every array, by stable name"""
        return {name: tensor.detach().cpu().numpy().copy() for name, tensor in self.state_dict().items()}

    def load_arrays(self, arrays: Dict[str, np.ndarray]) -> "ModelParams":
        """Replace every array; names and shapes must match this architecture"""
        expected = self.state_dict()
        missing = sorted(set(expected) - set(arrays))
        unknown = sorted(set(arrays) - set(expected))
        if missing or unknown:
            raise CheckpointError(f"array names do not match the architecture (missing {missing}, unknown {unknown})")
        for name, tensor in expected.items():
            value = np.asarray(arrays[name], dtype=np.float64)
            if tuple(value.shape) != tuple(tensor.shape):
                raise CheckpointError(f"array {name} has shape {value.shape}, expected {tuple(tensor.shape)}")
            if not np.all(np.isfinite(value)):
                raise CheckpointError(f"array {name} contains non-finite values")
        self.load_state_dict({name: torch.from_numpy(np.array(arrays[name], dtype=np.float64))
                              for name in expected})
        return self

    def copy(self) -> "ModelParams":
        clone = ModelParams(self.config)
        clone.load_state_dict(self.state_dict())
        return clone
