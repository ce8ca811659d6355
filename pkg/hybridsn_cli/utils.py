"""Utility functions for the HybridSN CLI."""

import importlib.metadata
import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.text import Text

LOG_FORMAT = "%(message)s"


def print_version(ctx, param, value):
    """Print the CLI version in a formatted panel.

    Used as a callback for the --version flag.
    """
    if not value or ctx.resilient_parsing:
        return

    console = Console()
    version = importlib.metadata.version("hybridsn-cli")

    version_text = Text(f"HybridSN CLI v{version}", style="bold green")
    panel = Panel(version_text, title="Version", border_style="blue", expand=False, title_align="left", padding=(1, 2))

    console.print(panel)
    ctx.exit(0)


def setup_logging(verbose: bool = False) -> None:
    """Route library logging through rich; ``verbose`` lowers the level to DEBUG."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=False, show_path=verbose)],
        force=True,
    )
