"""Logging setup shared by the CLI and library code."""

import logging
import os

from rich.logging import RichHandler

LOG_LEVEL_ENV = "DLADMM_LOG_LEVEL"
DEFAULT_LOG_LEVEL = "INFO"


def configure_logging(level: str | None = None) -> None:
    """Install a rich handler on the root logger.

    Args:
        level: Level name; falls back to ``DLADMM_LOG_LEVEL`` and then ``INFO``.

    """
    name = (level or os.environ.get(LOG_LEVEL_ENV) or DEFAULT_LOG_LEVEL).upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.INFO),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
        force=True,
    )
