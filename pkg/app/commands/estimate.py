"""
estimate Command
Location: jetnormals/app/commands/estimate.py

Normals of every point of a cloud with the PCA, jet or learned estimator.
"""

import logging
from typing import Optional

import click

from app.commands.common import load_run_config, shared_options, warn_ignored
from config.settings import METHODS, RunConfig
from core.estimators import make_estimator
from storage.point_files import read_points, write_normals
from training.checkpoint import Checkpoint

logger = logging.getLogger(__name__)


def untrained_selection_note(checkpoint: Checkpoint) -> Optional[str]:
    """Why an untrained checkpoint will not reproduce the jet estimator at its patch size, if it will not"""
    network = checkpoint.network_config
    if checkpoint.epoch > 0 or not network.use_topk or network.k >= network.patch_size:
        return None
    return (f"checkpoint is untrained and fits only the {network.k} nearest of {network.patch_size} patch points; "
            f"it matches --method jet --patch-size {network.patch_size} only when trained with k equal to the "
            f"patch size or --no-topk")


def run_estimate(config: RunConfig):
    cloud = read_points(config.input[0])
    checkpoint = Checkpoint.load(config.checkpoint) if config.method == "learned" else None
    note = untrained_selection_note(checkpoint) if checkpoint is not None else None
    if note:
        logger.warning(note)
    estimator = make_estimator(config.method, order=config.order, patch_size=config.patch_size,
                               threads=config.threads, checkpoint=checkpoint)
    normals = estimator.estimate(cloud)
    target = write_normals(config.out, normals)
    logger.info(f"Wrote {len(normals)} {config.method} normals to {target}")
    return target


@click.command("estimate")
@shared_options
@click.option("--input", "input", type=str, multiple=True, help="Input .xyz cloud.")
@click.option("--method", type=click.Choice(METHODS), default=None, help="Estimator.")
@click.option("--checkpoint", type=str, default=None,
              help="Model for --method learned. An untrained one (--epochs 0) equals the jet estimator "
                   "only when its k equals its patch size.")
@click.option("--order", type=int, default=None, help="Jet order.")
@click.option("--k", "k", type=int, default=None, help="Selected points (learned models store their own).")
@click.option("--patch-size", "patch_size", type=int, default=None, help="Neighbors per patch.")
@click.pass_context
def estimate_command(ctx, **flags):
    """Estimate normals of a point cloud."""
    config = load_run_config(ctx, "estimate", flags)
    if config.method == "learned":
        warn_ignored(ctx, ("order", "k", "patch_size"), "the checkpoint fixes it")
    else:
        warn_ignored(ctx, ("k", "checkpoint"), f"not used by --method {config.method}")
        if config.method == "pca":
            warn_ignored(ctx, ("order",), "not used by --method pca")
    run_estimate(config)
