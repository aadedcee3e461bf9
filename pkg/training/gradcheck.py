"""
Gradient Verification
Location: jetnormals/training/gradcheck.py

Compares the recorded backward pass against central finite differences of
the full training loss. For every parameter array the check uses one random
unit direction d and compares the analytic directional derivative <g, d>
with (L(theta + h d) - L(theta - h d)) / 2h. Selection, pooling and update
neighborhoods are piecewise constant, so when either probe lands on a
different branch than the base point the step shrinks.

Central differences of a loss L carry roundoff near eps |L| / h, so each
error is measured against max(|analytic|, |numeric|) plus a floor well
above that noise. Gradients that vanish exactly, like the update net's on
a flat patch, then compare in absolute terms.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np
import torch

from network.params import ModelParams
from network.pipeline import Tape, backward, run_batch
from synthetic.corpus import TrainingSample
from training.losses import loss_total, pipeline_losses
from utils.helpers import derive_rng, STREAM_GRADCHECK
from utils.validators import require_real_range

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
DEFAULT_TOLERANCE = 1e-4
ROUNDOFF_SCALE = 1e6
MAX_STEP_SHRINKS = 3
MAX_PATCH_SIZE = 64

GradientFn = Callable[[Tape, torch.Tensor], Dict[str, torch.Tensor]]


@dataclass
class GradCheckReport:
    max_relative_error: float
    tolerance: float
    relative_errors: Dict[str, float] = field(default_factory=dict)
    steps: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance

    @property
    def worst_array(self) -> Optional[str]:
        if not self.relative_errors:
            return None
        return max(self.relative_errors, key=self.relative_errors.get)


def roundoff_floor(loss: float, step: float) -> float:
    """Gradient size below which a central difference at this step is mostly roundoff"""
    return ROUNDOFF_SCALE * float(np.finfo(np.float64).eps) * max(1.0, abs(loss)) / step


def relative_error(analytic: float, numeric: float, floor: float = 0.0) -> float:
    difference = abs(analytic - numeric)
    if difference == 0.0:
        return 0.0
    return difference / (max(abs(analytic), abs(numeric)) + floor)


def _loss(params: ModelParams, sample: TrainingSample, alpha1: float, alpha2: float, per_neighbor: bool):
    tape = run_batch(params, sample.points[None])
    gt = torch.tensor(sample.gt_normal[None])
    neighbor_gt = torch.tensor(sample.neighbor_normals[None]) if per_neighbor else None
    parts = pipeline_losses(tape, gt, neighbor_gt)
    return tape, loss_total(parts, alpha1, alpha2).sum()


def grad_check(params: ModelParams, sample: TrainingSample, tolerance: float = DEFAULT_TOLERANCE,
               step: float = DEFAULT_STEP, seed: int = 0, alpha1: float = 1.0, alpha2: float = 0.1,
               per_neighbor: bool = False, gradient_fn: Optional[GradientFn] = None) -> GradCheckReport:
    """
    Directional finite-difference check of every parameter array.

    gradient_fn replaces the recorded backward (tape, loss) -> gradients,
    which lets tests feed in a deliberately wrong one.
    """
    tolerance = require_real_range("tolerance", tolerance, 0.0, strict_minimum=True)
    step = require_real_range("step", step, 0.0, strict_minimum=True)
    if len(sample.points) > MAX_PATCH_SIZE:
        logger.warning(f"Gradient check on a {len(sample.points)}-point patch; expect it to be slow")

    tape, loss = _loss(params, sample, alpha1, alpha2, per_neighbor)
    base_signature = tape.branch_signature()
    base_loss = float(loss)
    gradients = (gradient_fn or backward)(tape, loss)
    rng = derive_rng(seed, STREAM_GRADCHECK)

    def probe(parameter: torch.Tensor, offset: torch.Tensor):
        with torch.no_grad():
            original = parameter.detach().clone()
            parameter.add_(offset)
            probe_tape, value = _loss(params, sample, alpha1, alpha2, per_neighbor)
            parameter.copy_(original)
        return float(value), probe_tape.branch_signature()

    report = GradCheckReport(max_relative_error=0.0, tolerance=tolerance)
    for name, parameter in params.named_parameters():
        direction = torch.from_numpy(rng.standard_normal(tuple(parameter.shape)))
        direction /= torch.linalg.vector_norm(direction)
        analytic = float(torch.sum(gradients[name].detach() * direction))

        h = step
        for attempt in range(MAX_STEP_SHRINKS + 1):
            plus, plus_signature = probe(parameter, h * direction)
            minus, minus_signature = probe(parameter, -h * direction)
            if plus_signature == base_signature and minus_signature == base_signature:
                break
            if attempt < MAX_STEP_SHRINKS:
                h /= 10.0
        else:
            logger.warning(f"{name}: discrete branch still changes at step {h:.1e}")

        numeric = (plus - minus) / (2.0 * h)
        error = relative_error(analytic, numeric, roundoff_floor(base_loss, h))
        report.relative_errors[name] = error
        report.steps[name] = h
        report.max_relative_error = max(report.max_relative_error, error)
        logger.debug(f"{name}: analytic {analytic:.10g}, numeric {numeric:.10g}, rel. error {error:.3g}")

    return report
