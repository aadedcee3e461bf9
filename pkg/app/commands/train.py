"""
train Command
Location: jetnormals/app/commands/train.py

Samples patches from clouds with ground-truth normals, trains the learned
pipeline and saves the checkpoint with its loss trace.
"""

import dataclasses
import logging
from pathlib import Path
from typing import List

import click

from app.commands.common import load_run_config, shared_options
from config.settings import NEIGHBOR_TARGETS, RunConfig
from geometry.point_cloud import PointCloud
from storage.point_files import read_points, read_stem_list
from storage.reports import write_loss_trace
from synthetic.corpus import sample_training_patches
from training.checkpoint import Checkpoint
from training.trainer import train
from utils.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

TRACE_SUFFIX = ".trace.csv"


def training_clouds(config: RunConfig) -> List[PointCloud]:
    """--input clouds followed by the stems of a --shapes list (resolved next to the list)"""
    paths = [Path(p) for p in config.input]
    if config.shapes:
        shape_list = Path(config.shapes)
        paths.extend(shape_list.parent / f"{stem}.xyz" for stem in read_stem_list(shape_list))
    clouds = [read_points(path) for path in paths]
    for cloud in clouds:
        if not cloud.has_normals:
            raise InvalidInputError(f"training cloud {cloud.name} has no .normals file", "input")
    return clouds


def trace_path(config: RunConfig) -> Path:
    if config.trace:
        return Path(config.trace)
    out = Path(config.out)
    return out.with_name(out.stem + TRACE_SUFFIX)


def run_train(config: RunConfig):
    train_config = config.train_config()
    params, start_epoch = None, 0
    if config.checkpoint:
        resumed = Checkpoint.load(config.checkpoint)
        network = resumed.network_config
        train_config = dataclasses.replace(
            train_config, k=network.k, r=network.patch_size, n=network.order, m=network.m,
            use_topk=network.use_topk, use_update=network.use_update, force_center=network.force_center)
        params, start_epoch = resumed.params, resumed.epoch
        logger.info(f"Resuming from {config.checkpoint} at epoch {start_epoch}")

    clouds = training_clouds(config)
    samples = sample_training_patches(clouds, train_config.r, config.patches_per_shape, config.seed)
    result = train(train_config, samples, params=params, start_epoch=start_epoch)

    result.checkpoint.save(config.out)
    write_loss_trace(trace_path(config), result.trace)
    return result


@click.command("train")
@shared_options
@click.option("--input", "input", type=str, multiple=True, help="Training .xyz clouds (with .normals).")
@click.option("--shapes", type=str, default=None, help="Shape list file (one stem per line).")
@click.option("--checkpoint", type=str, default=None, help="Resume from this checkpoint.")
@click.option("--patches-per-shape", "patches_per_shape", type=int, default=None)
@click.option("--order", type=int, default=None, help="Jet order.")
@click.option("--k", "k", type=int, default=None, help="Points kept by top-k selection.")
@click.option("--patch-size", "patch_size", type=int, default=None, help="Neighbors per patch.")
@click.option("--m", "m", type=int, default=None, help="Neighbors of the point update.")
@click.option("--alpha1", type=float, default=None, help="Weight of the neighbor loss.")
@click.option("--alpha2", type=float, default=None, help="Weight of the rotation regularizer.")
@click.option("--lr", type=float, default=None, help="Adam learning rate.")
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", "batch_size", type=int, default=None)
@click.option("--trace", type=str, default=None, help="Loss trace CSV (default: <out>.trace.csv).")
@click.option("--topk/--no-topk", "use_topk", default=None, help="Top-k selection before the fit.")
@click.option("--update/--no-update", "use_update", default=None, help="Learned point update.")
@click.option("--force-center/--no-force-center", "force_center", default=None,
              help="Always keep the query point among the selected ones.")
@click.option("--neighbor-target", "neighbor_target", type=click.Choice(NEIGHBOR_TARGETS), default=None,
              help="Ground truth of the neighbor loss.")
@click.pass_context
def train_command(ctx, **flags):
    """Train the learned estimator."""
    config = load_run_config(ctx, "train", flags)
    run_train(config)
