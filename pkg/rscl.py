"""Solver suite launcher.

Runs the command line interface from a source checkout:

    python rscl.py run --config scenarios/burgers_steep.cfg
    python rscl.py check --config scenarios/burgers_steep.cfg
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
