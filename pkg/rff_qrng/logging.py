"""Loguru sink configuration for the CLI.

Library modules only ever call ``logger`` from loguru; sinks are installed
here, once, by the CLI callback.
"""

import sys

from loguru import logger

_LEVELS = {0: "WARNING", 1: "INFO", 2: "DEBUG"}


def configure_logging(verbosity: int = 0, json_logs: bool = False) -> None:
    """
    Replace loguru's default sink with a single stderr sink.

    Args:
        verbosity: 0 = warnings, 1 = info, 2+ = debug
        json_logs: Emit one JSON record per line instead of formatted text
    """
    level = _LEVELS.get(min(verbosity, 2), "DEBUG")
    logger.remove()
    if json_logs:
        logger.add(sys.stderr, level=level, serialize=True)
    else:
        logger.add(
            sys.stderr,
            level=level,
            format=(
                "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <7}</level> | "
                "<cyan>{name}</cyan> - <level>{message}</level> {extra}"
            ),
        )
