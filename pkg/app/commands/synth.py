"""
synth Command
Location: jetnormals/app/commands/synth.py

Generates one analytic shape (optionally noisy and density-modulated) or a
whole benchmark-style corpus directory.
"""

import logging

import click

from app.commands.common import load_run_config, shared_options, warn_ignored, with_suffix_if_missing
from config.settings import DENSITY_MODES, SHAPES, RunConfig
from storage.point_files import write_normals, write_points
from synthetic.augment import AugmentSpec, augment
from synthetic.corpus import write_corpus
from synthetic.shapes import ShapeSpec, gen_shape
from utils.helpers import sibling_path

logger = logging.getLogger(__name__)


def shape_spec(config: RunConfig) -> ShapeSpec:
    parameters = {"quadric": config.coeffs, "sphere": (config.radius,), "dihedral": (config.angle,)}
    return ShapeSpec(config.shape, parameters[config.shape], config.count, config.seed)


def run_synth(config: RunConfig):
    if config.corpus:
        return write_corpus(config.corpus, config.train_shapes, config.test_shapes, config.count,
                            config.seed, config.subset_size)

    cloud = augment(gen_shape(shape_spec(config)), AugmentSpec(config.sigma, config.density, config.seed))
    target = with_suffix_if_missing(config.out, ".xyz")
    write_points(target, cloud.points)
    write_normals(sibling_path(target, ".normals"), cloud.gt_normals)
    logger.info(f"Wrote {len(cloud)} points of a {config.shape} to {target}")
    return target


@click.command("synth")
@shared_options
@click.option("--shape", type=click.Choice(SHAPES), default=None, help="Analytic shape kind.")
@click.option("--coeffs", type=str, default=None, help="Comma-separated quadric jet coefficients.")
@click.option("--radius", type=float, default=None, help="Sphere radius.")
@click.option("--angle", type=float, default=None, help="Dihedral opening angle in degrees.")
@click.option("--count", type=int, default=None, help="Points sampled before density subsampling.")
@click.option("--sigma", "--noise", "sigma", type=float, default=None,
              help="Gaussian noise as a fraction of the bounding box diagonal.")
@click.option("--density", type=click.Choice(DENSITY_MODES), default=None, help="Density modulation.")
@click.option("--corpus", type=str, default=None, help="Write a full corpus into this directory.")
@click.option("--train-shapes", "train_shapes", type=int, default=None)
@click.option("--test-shapes", "test_shapes", type=int, default=None)
@click.option("--subset-size", "subset_size", type=int, default=None, help="Evaluation subset per test shape.")
@click.pass_context
def synth_command(ctx, **flags):
    """Generate a synthetic cloud or corpus."""
    config = load_run_config(ctx, "synth", flags)
    if config.corpus:
        warn_ignored(ctx, ("shape", "coeffs", "radius", "angle", "sigma", "density", "out"),
                     "--corpus generates its own shapes")
    run_synth(config)
