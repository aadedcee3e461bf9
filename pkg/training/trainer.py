"""
Trainer
Location: jetnormals/training/trainer.py

Mini-batch Adam training of the learned pipeline on patches with known
normals. Parameter initialization and the per-epoch shuffle draw from
separate streams of one seed, so identical inputs give identical traces.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import torch

from config.settings import NEIGHBOR_TARGETS
from network.params import ModelParams, NetworkConfig
from network.pipeline import backward, run_batch
from synthetic.corpus import TrainingSample
from training.checkpoint import Checkpoint
from training.losses import LossParts, loss_total, pipeline_losses
from utils.exceptions import CheckpointError, InvalidInputError, TrainingDivergenceError
from utils.helpers import derive_rng, derive_seed, STREAM_INIT, STREAM_SHUFFLE
from utils.validators import require_choice, require_int_range, require_real_range

logger = logging.getLogger(__name__)

ADAM_BETAS = (0.9, 0.999)
ADAM_EPSILON = 1e-8
TRACE_COLUMNS = ["epoch", "mean_loss"]


@dataclass
class TrainConfig:
    """Optimization and pipeline hyper-parameters of one training run"""
    batch_size: int = 48
    learning_rate: float = 1e-3
    epochs: int = 10
    alpha1: float = 1.0
    alpha2: float = 0.1
    k: int = 50
    r: int = 256
    n: int = 3
    m: int = 8
    seed: int = 0
    use_topk: bool = True
    use_update: bool = True
    force_center: bool = False
    neighbor_target: str = "center"

    def __post_init__(self):
        require_int_range("batch_size", self.batch_size, minimum=1)
        require_real_range("learning_rate", self.learning_rate, 0.0, strict_minimum=True)
        require_int_range("epochs", self.epochs, minimum=0)
        require_real_range("alpha1", self.alpha1, 0.0)
        require_real_range("alpha2", self.alpha2, 0.0)
        require_int_range("seed", self.seed, minimum=0)
        require_choice("neighbor_target", self.neighbor_target, NEIGHBOR_TARGETS)
        self.network_config()

    def network_config(self) -> NetworkConfig:
        return NetworkConfig(order=self.n, k=self.k, patch_size=self.r, m=self.m, use_topk=self.use_topk,
                             use_update=self.use_update, force_center=self.force_center)

    def metadata(self) -> Dict[str, str]:
        return {key: (str(value).lower() if isinstance(value, bool) else
                      repr(value) if isinstance(value, float) else str(value))
                for key, value in asdict(self).items()}

    @classmethod
    def from_metadata(cls, metadata: Dict[str, str]) -> "TrainConfig":
        fields = cls.__dataclass_fields__
        values = {}
        for key, text in metadata.items():
            if key not in fields:
                raise CheckpointError(f"unknown training key '{key}'")
            default = fields[key].default
            try:
                if isinstance(default, bool):
                    values[key] = text.strip().lower() == "true"
                elif isinstance(default, int):
                    values[key] = int(text)
                elif isinstance(default, float):
                    values[key] = float(text)
                else:
                    values[key] = text.strip()
            except ValueError:
                raise CheckpointError(f"bad value {text!r} for training key '{key}'")
        return cls(**values)


@dataclass(eq=False)
class TrainResult:
    checkpoint: Checkpoint
    trace: pd.DataFrame


def _check_samples(config: TrainConfig, samples: Sequence[TrainingSample]):
    if not samples:
        raise InvalidInputError("training corpus is empty", "corpus")
    sizes = {len(s.points) for s in samples}
    if sizes != {config.r}:
        raise InvalidInputError(f"all patches must have {config.r} points, found sizes {sorted(sizes)}", "corpus")
    if config.neighbor_target == "neighbor" and any(s.neighbor_normals is None for s in samples):
        raise InvalidInputError("per-neighbor targets need neighbor ground truth in every sample", "corpus")


def _batch_losses(params: ModelParams, config: TrainConfig, batch: List[TrainingSample]):
    tape = run_batch(params, np.stack([s.points for s in batch]))
    gt = torch.tensor(np.stack([s.gt_normal for s in batch]))
    neighbor_gt = None
    if config.neighbor_target == "neighbor":
        neighbor_gt = torch.tensor(np.stack([s.neighbor_normals for s in batch]))
    parts = pipeline_losses(tape, gt, neighbor_gt)
    return tape, parts, loss_total(parts, config.alpha1, config.alpha2)


def evaluate_losses(params: ModelParams, config: TrainConfig, samples: Sequence[TrainingSample]) -> Dict[str, float]:
    """Mean loss parts over a corpus without updating anything"""
    sums = {"center": 0.0, "neighbors": 0.0, "reg": 0.0, "total": 0.0}
    with torch.no_grad():
        for start in range(0, len(samples), config.batch_size):
            _, parts, total = _batch_losses(params, config, list(samples[start:start + config.batch_size]))
            sums["center"] += float(parts.center.sum())
            sums["neighbors"] += float(parts.neighbors.sum())
            sums["reg"] += float(parts.reg.sum())
            sums["total"] += float(total.sum())
    return {key: value / len(samples) for key, value in sums.items()}


def train(config: TrainConfig, samples: Sequence[TrainingSample], params: Optional[ModelParams] = None,
          start_epoch: int = 0) -> TrainResult:
    """Adam over shuffled mini-batches; returns the final checkpoint and the per-epoch trace"""
    _check_samples(config, samples)
    if params is None:
        params = ModelParams(config.network_config()).initialize(derive_seed(config.seed, STREAM_INIT))
    optimizer = torch.optim.Adam(params.parameters(), lr=config.learning_rate, betas=ADAM_BETAS, eps=ADAM_EPSILON)
    shuffle = derive_rng(config.seed, STREAM_SHUFFLE)
    named = dict(params.named_parameters())

    rows = []
    for epoch in range(start_epoch + 1, start_epoch + config.epochs + 1):
        order = shuffle.permutation(len(samples))
        sums = LossParts(center=0.0, neighbors=0.0, reg=0.0)
        total_sum = 0.0

        for batch_index, start in enumerate(range(0, len(order), config.batch_size)):
            batch = [samples[i] for i in order[start:start + config.batch_size]]
            tape, parts, total = _batch_losses(params, config, batch)
            loss = total.mean()
            value = float(loss)
            if not math.isfinite(value):
                raise TrainingDivergenceError(epoch, batch_index, value)

            grads = backward(tape, loss)
            broken = [name for name, grad in grads.items() if not bool(torch.isfinite(grad).all())]
            if broken:
                logger.error(f"Non-finite gradients at epoch {epoch}, batch {batch_index}: {', '.join(broken)}")
                raise TrainingDivergenceError(epoch, batch_index, value)
            optimizer.zero_grad()
            for name, parameter in named.items():
                parameter.grad = grads[name]
            optimizer.step()

            total_sum += float(total.detach().sum())
            sums.center += float(parts.center.detach().sum())
            sums.neighbors += float(parts.neighbors.detach().sum())
            sums.reg += float(parts.reg.detach().sum())
            logger.debug(f"epoch {epoch} batch {batch_index}: loss {value:.6g}")

        mean_loss = total_sum / len(samples)
        rows.append({"epoch": epoch, "mean_loss": mean_loss})
        logger.info(f"Epoch {epoch}: mean loss {mean_loss:.6g} (center {sums.center / len(samples):.6g}, "
                    f"neighbors {sums.neighbors / len(samples):.6g}, reg {sums.reg / len(samples):.3g})")

    checkpoint = Checkpoint(params=params, train_config=config, epoch=start_epoch + config.epochs)
    return TrainResult(checkpoint=checkpoint, trace=pd.DataFrame(rows, columns=TRACE_COLUMNS))
