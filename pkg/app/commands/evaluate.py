"""
eval Command
Location: jetnormals/app/commands/evaluate.py

Scores estimated normals against ground truth for one or more clouds and
writes the per-shape report, the per-category table and optional heatmaps.
"""

import logging
from pathlib import Path
from typing import List, Optional

import click

from app.commands.common import load_run_config, shared_options
from config.settings import HEATMAP_FORMATS, RunConfig
from evaluation.evaluator import EvalReport, evaluate_normals
from evaluation.heatmap import export_heatmap
from storage.point_files import read_indices, read_normals, read_points
from storage.reports import category_table_path, write_category_table, write_report_csv
from utils.exceptions import InvalidInputError
from utils.helpers import sibling_path

logger = logging.getLogger(__name__)

SUBSET_SUFFIXES = (".idx", ".pidx")


def estimate_path(config: RunConfig, input_path: Path) -> Path:
    """--normals is the estimate file for a single cloud or a directory of <stem>.normals"""
    normals = Path(config.normals)
    if normals.is_dir():
        return normals / f"{input_path.stem}.normals"
    if len(config.input) > 1:
        raise InvalidInputError("--normals must be a directory when several clouds are evaluated", "normals")
    return normals


def subset_path(config: RunConfig, input_path: Path) -> Optional[Path]:
    """--idx for a single cloud, otherwise a sibling .idx or .pidx when one exists"""
    if config.idx:
        if len(config.input) > 1:
            raise InvalidInputError("--idx applies to a single cloud", "idx")
        return Path(config.idx)
    for suffix in SUBSET_SUFFIXES:
        candidate = sibling_path(input_path, suffix)
        if candidate.is_file():
            return candidate
    return None


def heatmap_path(config: RunConfig, name: str) -> Path:
    base = Path(config.heatmap)
    suffix = base.suffix or f".{config.heatmap_format}"
    if len(config.input) == 1:
        return base.with_suffix(suffix)
    return base.with_name(f"{base.stem}_{name}{suffix}")


def run_eval(config: RunConfig) -> List[EvalReport]:
    reports = []
    clouds = []
    for raw_path in config.input:
        input_path = Path(raw_path)
        cloud = read_points(input_path)
        if not cloud.has_normals:
            raise InvalidInputError(f"{input_path} has no ground-truth .normals file", "input")
        estimates = read_normals(estimate_path(config, input_path), expected=len(cloud))
        indices_path = subset_path(config, input_path)
        indices = read_indices(indices_path, len(cloud)) if indices_path else None
        if indices_path:
            logger.info(f"Evaluating {cloud.name} on the subset in {indices_path}")
        reports.append(evaluate_normals(cloud, estimates, indices=indices, subset_size=config.subset_size,
                                        seed=config.seed, category=config.category))
        clouds.append(cloud)

    write_report_csv(config.out, reports)
    write_category_table(category_table_path(config.out), reports)
    if config.heatmap:
        for cloud, report in zip(clouds, reports):
            export_heatmap(cloud, report.per_point_errors, heatmap_path(config, cloud.name),
                           indices=report.eval_indices, fmt=config.heatmap_format)
    return reports


@click.command("eval")
@shared_options
@click.option("--input", "input", type=str, multiple=True, help="Clouds with ground-truth .normals.")
@click.option("--normals", type=str, default=None, help="Estimated normals file or directory.")
@click.option("--idx", type=str, default=None, help="Evaluation subset (.idx or .pidx).")
@click.option("--category", type=str, default=None, help="Category label instead of the one in the stem.")
@click.option("--subset-size", "subset_size", type=int, default=None, help="Seeded subset size without --idx.")
@click.option("--heatmap", type=str, default=None, help="Heatmap path (prefix for several clouds).")
@click.option("--heatmap-format", "heatmap_format", type=click.Choice(HEATMAP_FORMATS), default=None)
@click.pass_context
def eval_command(ctx, **flags):
    """Evaluate estimated normals against ground truth."""
    config = load_run_config(ctx, "eval", flags)
    run_eval(config)
