"""Logging utilities"""

import logging
import os
import sys
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def get_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """Get a configured logger under the ``tendex`` namespace"""
    if not name.startswith("tendex"):
        name = f"tendex.{name}"
    logger = logging.getLogger(name)

    if not logger.handlers:
        # stdout carries command results, so diagnostics go to stderr
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.propagate = False
        logger.setLevel(getattr(logging, level or os.getenv("TENDEX_LOG_LEVEL", "INFO")))

    return logger


def set_level(level: str) -> None:
    """Apply a log level to every tendex logger created so far"""
    numeric = getattr(logging, level.upper())
    for name, logger in logging.Logger.manager.loggerDict.items():
        if name.startswith("tendex") and isinstance(logger, logging.Logger):
            logger.setLevel(numeric)
