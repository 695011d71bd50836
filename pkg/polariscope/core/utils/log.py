"""
Logging setup for the command line
"""

import logging

from rich.console import Console
from rich.logging import RichHandler


def configure_logging(quiet: bool = False) -> None:
    """Route every polariscope logger through a rich handler on stderr"""
    handler = RichHandler(
        console=Console(stderr=True), show_path=False, markup=False
    )
    handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    root = logging.getLogger("polariscope")
    root.handlers[:] = [handler]
    root.setLevel(logging.WARNING if quiet else logging.INFO)
    root.propagate = False
