"""
jetnormals Command Runner
Runs one subcommand: python run.py <synth|estimate|train|eval|fit-debug|gradcheck> [flags]
"""
import sys

from app.main import cli_dispatch

if __name__ == '__main__':
    sys.exit(cli_dispatch())
