import logging

from rich.console import Console
from rich.logging import RichHandler

# Diagnostics go to stderr; results only ever go to files.
diagnostics_console = Console(stderr=True)


def setup_logging(loglevel: str = "INFO") -> None:
    logging.basicConfig(
        level=loglevel,
        format="%(message)s",
        handlers=[RichHandler(console=diagnostics_console, rich_tracebacks=True)],
        force=True,
    )


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance"""
    return logging.getLogger(name)
