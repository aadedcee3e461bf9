"""
fit-debug Command
Location: jetnormals/app/commands/fit_debug.py

Exports the selection, fitted points and jet surface of one query point.
"""

import logging

import click

from app.commands.common import load_run_config, shared_options, warn_ignored
from config.settings import METHODS, RunConfig
from core.fit_debug import debug_patch, export_fit_debug
from storage.point_files import read_points
from training.checkpoint import Checkpoint

logger = logging.getLogger(__name__)


def run_fit_debug(config: RunConfig):
    cloud = read_points(config.input[0])
    checkpoint = Checkpoint.load(config.checkpoint) if config.method == "learned" else None
    debug = debug_patch(cloud, config.center, config.method, config.patch_size, config.order, checkpoint)
    if debug.error_deg is not None:
        logger.info(f"Point {config.center}: {config.method} error {debug.error_deg:.4f} deg")
    return export_fit_debug(debug, config.out, config.grid)


@click.command("fit-debug")
@shared_options
@click.option("--input", "input", type=str, multiple=True, help="Input .xyz cloud.")
@click.option("--center", type=int, default=None, help="Query point index.")
@click.option("--method", type=click.Choice(METHODS), default=None, help="Estimator.")
@click.option("--checkpoint", type=str, default=None, help="Trained model for --method learned.")
@click.option("--order", type=int, default=None, help="Jet order.")
@click.option("--patch-size", "patch_size", type=int, default=None, help="Neighbors per patch.")
@click.option("--grid", type=int, default=None, help="Surface grid resolution per axis.")
@click.pass_context
def fit_debug_command(ctx, **flags):
    """Inspect the fit at one query point."""
    config = load_run_config(ctx, "fit-debug", flags)
    if config.method == "learned":
        warn_ignored(ctx, ("order", "patch_size"), "the checkpoint fixes it")
    run_fit_debug(config)
