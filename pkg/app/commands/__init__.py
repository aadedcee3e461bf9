"""
Commands Package Initialization
Location: jetnormals/app/commands/__init__.py

Registers every subcommand with the command-line group.
"""

from .estimate import estimate_command
from .evaluate import eval_command
from .fit_debug import fit_debug_command
from .gradcheck import gradcheck_command
from .synth import synth_command
from .train import train_command

COMMANDS = (synth_command, estimate_command, train_command, eval_command, fit_debug_command, gradcheck_command)


def register_commands(group):
    """Attach all subcommands to the group"""
    for command in COMMANDS:
        group.add_command(command)
    return group
