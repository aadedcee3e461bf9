"""
Shared Command Plumbing
Location: jetnormals/app/commands/common.py

Options every subcommand accepts and the step that turns parsed flags into
a validated RunConfig (defaults, then the --config file, then flags).
"""

import logging
from pathlib import Path
from typing import Any, Dict, Iterable

import click
from click.core import ParameterSource

from config.settings import RunConfig

logger = logging.getLogger(__name__)


def shared_options(command):
    """--config, --seed, --threads and --out"""
    command = click.option("--out", "out", type=str, default=None, help="Output path (or prefix).")(command)
    command = click.option("--threads", type=int, default=None,
                           help="Worker threads; 0 uses every CPU.")(command)
    command = click.option("--seed", type=int, default=None, help="Seed of every random stream.")(command)
    command = click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                           help="Flat key = value file; flags override its values.")(command)
    return command


def load_run_config(ctx: click.Context, command: str, flags: Dict[str, Any]) -> RunConfig:
    """Merge defaults, config file and flags, then validate for the command"""
    root = ctx.find_root().obj or {}
    config_path = flags.pop("config_path", None) or root.get("config_path")
    overrides = {key: (None if value == () else value) for key, value in flags.items()}
    config = RunConfig.load(config_path, overrides).validate_for(command)
    logger.info(f"{command}: seed {config.seed}" + (f", config file {config_path}" if config_path else ""))
    return config


def warn_ignored(ctx: click.Context, names: Iterable[str], reason: str):
    """Log flags that were given on the command line but have no effect"""
    for name in names:
        if ctx.get_parameter_source(name) == ParameterSource.COMMANDLINE:
            logger.warning(f"--{name.replace('_', '-')} is ignored: {reason}")


def with_suffix_if_missing(path: str, suffix: str) -> Path:
    path = Path(path)
    return path if path.suffix else path.with_suffix(suffix)
