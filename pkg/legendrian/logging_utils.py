"""Tagged stderr loggers: every line reads "[TAG] message"."""

import logging
import sys

from legendrian.config import LOG_LEVEL

_FORMAT = "[%(tag)s] %(message)s"


class _TagFilter(logging.Filter):
    def __init__(self, tag: str):
        super().__init__()
        self.tag = tag

    def filter(self, record: logging.LogRecord) -> bool:
        record.tag = self.tag
        return True


def get_logger(tag: str) -> logging.Logger:
    """Return the logger for a component, configured on first use."""
    logger = logging.getLogger(f"legendrian.{tag.lower()}")
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_FORMAT))
        handler.addFilter(_TagFilter(tag.upper()))
        logger.addHandler(handler)
        logger.setLevel(LOG_LEVEL)
        logger.propagate = False
    return logger
