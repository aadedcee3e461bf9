"""
Checkpoints
Location: jetnormals/training/checkpoint.py

A trained (or freshly initialized) model with the hyper-parameters it was
built and trained with, saved in the text checkpoint format.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

from network.params import ModelParams, NetworkConfig, PARAMS_VERSION
from storage.checkpoint_format import read_checkpoint_file, write_checkpoint_file
from utils.exceptions import CheckpointError, InvalidInputError
from utils.helpers import PathLike

logger = logging.getLogger(__name__)

META_PREFIX = "meta."
TRAIN_PREFIX = "train."


@dataclass(eq=False)
class Checkpoint:
    params: ModelParams
    train_config: Optional[object] = None
    epoch: int = 0
    version: int = PARAMS_VERSION

    @property
    def network_config(self) -> NetworkConfig:
        return self.params.config

    @classmethod
    def fresh(cls, config: NetworkConfig, seed: int = 0) -> "Checkpoint":
        """Untrained model: identity QST, equal weights, zero update"""
        return cls(params=ModelParams(config).initialize(seed))

    def header(self) -> Dict[str, str]:
        header = {"version": str(self.version), "epoch": str(self.epoch)}
        header.update({META_PREFIX + key: value for key, value in self.network_config.metadata().items()})
        if self.train_config is not None:
            header.update({TRAIN_PREFIX + key: value for key, value in self.train_config.metadata().items()})
        return header

    def save(self, path: PathLike):
        target = write_checkpoint_file(path, self.header(), self.params.named_arrays())
        logger.info(f"Saved checkpoint (epoch {self.epoch}) to {target}")
        return target

    @classmethod
    def load(cls, path: PathLike) -> "Checkpoint":
        from training.trainer import TrainConfig

        header, arrays = read_checkpoint_file(path)
        try:
            version = int(header.get("version", ""))
            epoch = int(header.get("epoch", "0"))
        except ValueError:
            raise CheckpointError("version and epoch must be integers", str(path))
        if version != PARAMS_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version} (expected {PARAMS_VERSION})", str(path))

        meta = {k[len(META_PREFIX):]: v for k, v in header.items() if k.startswith(META_PREFIX)}
        train = {k[len(TRAIN_PREFIX):]: v for k, v in header.items() if k.startswith(TRAIN_PREFIX)}
        try:
            params = ModelParams(NetworkConfig.from_metadata(meta)).load_arrays(arrays)
            train_config = TrainConfig.from_metadata(train) if train else None
        except (CheckpointError, InvalidInputError) as e:
            raise CheckpointError(e.message, str(path))

        logger.debug(f"Loaded checkpoint {path} at epoch {epoch}")
        return cls(params=params, train_config=train_config, epoch=epoch, version=version)
