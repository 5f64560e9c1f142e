"""
# Logging Helpers

* Description:

    Installs the toolkit's single stream handler. Library modules only
    call ``logging.getLogger(__name__)``; the CLI decides verbosity.
"""

import logging
import sys

import RopeTK


LOG_FORMAT = "[%(name)s] %(levelname)s: %(message)s"


def configure_logging(verbosity: int = 0) -> logging.Logger:
    """
    Configure the package logger.

    Args:
        verbosity (int): ``> 0`` enables DEBUG, ``< 0`` restricts to WARNING,
            ``0`` keeps INFO.

    Returns:
        logging.Logger: The configured top-level package logger.
    """
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    else:
        level = logging.INFO

    logger = logging.getLogger(RopeTK.MODULE_NAME)
    logger.setLevel(level)
    if not any(getattr(h, "_rope_handler", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._rope_handler = True
        logger.addHandler(handler)
    return logger
