"""
Entry point for running gls-normal via `python -m gls_normal` or the `gls-normal` command.
"""

import sys

from gls_normal.cli import main as cli_main


def main() -> None:
    """Run the command-line interface and exit with its status."""
    sys.exit(cli_main())


if __name__ == '__main__':
    main()
