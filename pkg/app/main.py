"""
Main Application Entry Point
Location: jetnormals/app/main.py

Command-line application factory and dispatch with exit-status mapping:
0 on success, 1 for any jetnormals error, 2 for usage errors.
"""

import logging
import sys
from typing import Optional, Sequence

import click
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from app.commands import register_commands
from config.logging import setup_logging
from config.settings import LoggingConfig
from utils.exceptions import JetNormalsError

logger = logging.getLogger(__name__)

PROG_NAME = "jetnormals"


def create_cli() -> click.Group:
    """Create the command group with every subcommand registered"""

    @click.group(name=PROG_NAME, context_settings={"help_option_names": ["-h", "--help"]})
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                  help="Flat key = value file applied to every subcommand.")
    @click.option("-v", "--verbose", is_flag=True, default=False, help="Debug logging.")
    @click.pass_context
    def cli(ctx, config_path, verbose):
        """Point-cloud normal estimation with learned weighted jet fitting."""
        ctx.ensure_object(dict)
        ctx.obj["config_path"] = config_path
        setup_logging(LoggingConfig(), verbose)

    register_commands(cli)
    return cli


cli = create_cli()


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command line and return its exit status"""
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name=PROG_NAME, standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except JetNormalsError as e:
        logger.debug(f"{e.error_code}: {e.details}")
        click.echo(f"error: {e.message}", err=True)
        return 1
    return result if isinstance(result, int) else 0
