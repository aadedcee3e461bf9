"""
Report Files
Location: jetnormals/storage/reports.py

CSV outputs of evaluation and training. Floats are written with ten
significant digits and '.' as the decimal separator; every file goes
through an atomic write.
"""

import logging
from pathlib import Path
from typing import Sequence

import pandas as pd

from evaluation.evaluator import EvalReport, aggregate_categories, reports_frame
from utils.exceptions import InvalidInputError
from utils.helpers import PathLike, atomic_write_text

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"
TABLE_SUFFIX = ".table.csv"


def frame_to_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    return atomic_write_text(path, frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))


def category_table_path(report_path: PathLike) -> Path:
    """<stem>.table.csv next to the per-shape report"""
    path = Path(report_path)
    return path.with_name(path.stem + TABLE_SUFFIX)


def write_report_csv(path: PathLike, reports: Sequence[EvalReport]) -> Path:
    """One row per evaluated shape: shape, category, points, rmse, pgp columns"""
    if not reports:
        raise InvalidInputError("no reports to write", "reports")
    target = frame_to_csv(reports_frame(list(reports)), path)
    logger.info(f"Wrote report of {len(reports)} shapes to {target}")
    return target


def write_category_table(path: PathLike, reports: Sequence[EvalReport]) -> Path:
    """Per-category means with the closing Average row"""
    table = aggregate_categories(reports)
    target = frame_to_csv(table, path)
    average = table.iloc[-1]
    logger.info(f"Category table written to {target}; average RMSE {average['rmse']:.4f} deg")
    return target


def write_loss_trace(path: PathLike, trace: pd.DataFrame) -> Path:
    """epoch,mean_loss rows of a training run"""
    missing = {"epoch", "mean_loss"} - set(trace.columns)
    if missing:
        raise InvalidInputError(f"loss trace lacks columns {sorted(missing)}", "trace")
    return frame_to_csv(trace[["epoch", "mean_loss"]], path)


def read_csv_table(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"file not found: {path}", "path")
    return pd.read_csv(path)
