import logging
from typing import Optional

from app.core.config import settings

_handler: Optional[logging.Handler] = None


def _shared_handler() -> logging.Handler:
    global _handler
    if _handler is None:
        _handler = logging.StreamHandler()
        _handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    return _handler


def get_logger(component: str) -> logging.Logger:
    """Returns the logger for a component; messages read `Component: message`."""
    logger = logging.getLogger(component)
    if not logger.handlers:
        logger.addHandler(_shared_handler())
        logger.setLevel(settings.LOG_LEVEL.upper())
        logger.propagate = False
    return logger
