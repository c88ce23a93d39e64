"""Logging setup for the command line."""

import logging
import sys

from .config import LOG_LEVEL

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Attach one stderr handler to the package logger."""
    logger = logging.getLogger('apperception')
    if logger.handlers:
        logger.setLevel(level)
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
