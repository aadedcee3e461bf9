"""
gradcheck Command
Location: jetnormals/app/commands/gradcheck.py

Verifies recorded gradients against central finite differences on random
patches; exits with status 1 when any parameter array exceeds the tolerance.
"""

import logging
from typing import List

import click
import pandas as pd

from app.commands.common import load_run_config, shared_options
from config.settings import NEIGHBOR_TARGETS, RunConfig
from network.params import ModelParams
from storage.point_files import read_points
from storage.reports import frame_to_csv
from synthetic.corpus import TrainingSample, random_patches, sample_training_patches
from training.checkpoint import Checkpoint
from training.gradcheck import GradCheckReport, grad_check
from utils.exceptions import GradientCheckError
from utils.helpers import derive_seed, STREAM_INIT

logger = logging.getLogger(__name__)


def gradcheck_samples(config: RunConfig, r: int) -> List[TrainingSample]:
    if config.input:
        clouds = [read_points(path) for path in config.input]
        per_shape = -(-config.samples // len(clouds))
        return sample_training_patches(clouds, r, per_shape, config.seed)[:config.samples]
    return random_patches(config.samples, r, config.seed)


def run_gradcheck(config: RunConfig) -> List[GradCheckReport]:
    if config.checkpoint:
        params = Checkpoint.load(config.checkpoint).params
    else:
        params = ModelParams(config.network_config()).randomize(derive_seed(config.seed, STREAM_INIT))
    samples = gradcheck_samples(config, params.config.patch_size)

    reports = []
    rows = []
    for position, sample in enumerate(samples):
        report = grad_check(params, sample, tolerance=config.tolerance, step=config.step,
                            seed=derive_seed(config.seed, position), alpha1=config.alpha1, alpha2=config.alpha2,
                            per_neighbor=config.neighbor_target == "neighbor")
        reports.append(report)
        rows.extend({"sample": position, "array": name, "relative_error": error, "step": report.steps[name]}
                    for name, error in report.relative_errors.items())
        logger.info(f"Patch {position}: max relative error {report.max_relative_error:.3g} "
                    f"({report.worst_array})")

    if config.out:
        frame_to_csv(pd.DataFrame(rows, columns=["sample", "array", "relative_error", "step"]), config.out)

    worst = max(reports, key=lambda report: report.max_relative_error)
    if not worst.passed:
        raise GradientCheckError(worst.max_relative_error, config.tolerance, worst.worst_array)
    logger.info(f"Gradient check passed on {len(reports)} patches (max relative error "
                f"{worst.max_relative_error:.3g})")
    return reports


@click.command("gradcheck")
@shared_options
@click.option("--input", "input", type=str, multiple=True, help="Clouds to cut patches from (default: synthetic).")
@click.option("--checkpoint", type=str, default=None, help="Check this model instead of a random one.")
@click.option("--samples", type=int, default=None, help="Number of patches.")
@click.option("--order", type=int, default=None, help="Jet order.")
@click.option("--k", "k", type=int, default=None, help="Points kept by top-k selection.")
@click.option("--patch-size", "patch_size", type=int, default=None, help="Neighbors per patch.")
@click.option("--m", "m", type=int, default=None, help="Neighbors of the point update.")
@click.option("--alpha1", type=float, default=None)
@click.option("--alpha2", type=float, default=None)
@click.option("--tolerance", type=float, default=None, help="Largest accepted relative error.")
@click.option("--step", type=float, default=None, help="Finite-difference step.")
@click.option("--topk/--no-topk", "use_topk", default=None)
@click.option("--update/--no-update", "use_update", default=None)
@click.option("--force-center/--no-force-center", "force_center", default=None)
@click.option("--neighbor-target", "neighbor_target", type=click.Choice(NEIGHBOR_TARGETS), default=None)
@click.pass_context
def gradcheck_command(ctx, **flags):
    """Check gradients against finite differences."""
    config = load_run_config(ctx, "gradcheck", flags)
    run_gradcheck(config)
