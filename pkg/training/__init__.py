"""
Training Package
Location: jetnormals/training/__init__.py

Losses, the Adam training loop, gradient verification and checkpoints.
"""

from .checkpoint import Checkpoint
from .gradcheck import GradCheckReport, grad_check
from .losses import LossParts, loss_center, loss_neighbors, loss_reg, loss_total, pipeline_losses
from .trainer import TrainConfig, TrainResult, evaluate_losses, train

__all__ = [
    'Checkpoint', 'GradCheckReport', 'grad_check',
    'LossParts', 'loss_center', 'loss_neighbors', 'loss_reg', 'loss_total', 'pipeline_losses',
    'TrainConfig', 'TrainResult', 'evaluate_losses', 'train',
]
