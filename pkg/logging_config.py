"""
Logging setup shared by every conflict-forest module.

Modules obtain loggers with ``get_logger(__name__)``. The root handler is
configured once, lazily, from the level and optional log file in settings.
Log records always go to stderr (and the file, if set); stdout is kept for
command results.
"""

import logging
import os
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
ROOT_LOGGER_NAME = "conflict_forest"

_configured = False


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the package root logger.

    Args:
        level: Level name such as "DEBUG" or "WARNING". Falls back to
            CONFLICT_FOREST_LOG_LEVEL, then WARNING.
        log_file: Optional path for an extra file handler. Falls back to
            CONFLICT_FOREST_LOG_FILE.

    Returns:
        The configured root logger for the package
    """
    global _configured

    level_name = (level or os.getenv("CONFLICT_FOREST_LOG_LEVEL") or "WARNING").upper()
    log_file = log_file or os.getenv("CONFLICT_FOREST_LOG_FILE")

    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(getattr(logging, level_name, logging.WARNING))

    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
        root.propagate = False
        if log_file:
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
            root.addHandler(file_handler)
        _configured = True

    return root


def set_level(level: str) -> None:
    """Change the package log level after setup (used by --verbose/--debug)."""
    setup_logging()
    logging.getLogger(ROOT_LOGGER_NAME).setLevel(getattr(logging, level.upper(), logging.WARNING))


def get_logger(name: str) -> logging.Logger:
    """
    Return a logger nested under the package root logger.

    Args:
        name: Usually ``__name__``, optionally with a ``.ClassName`` suffix

    Returns:
        Logger named ``conflict_forest.<name>``
    """
    if not _configured:
        setup_logging()
    if name == "__main__":
        name = "cli"
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")
