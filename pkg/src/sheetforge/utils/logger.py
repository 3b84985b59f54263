"""Configures and provides a logger for the application."""

import logging
import os
from datetime import datetime

from sheetforge.utils.constants import LOG_DIR, LOG_LEVEL

_console_handlers: list[logging.Handler] = []


def get_logger(name: str | None = None, log_dir: str | None = None) -> logging.Logger:
    """Initialize and return a configured logger.

    Args:
        name (str): Optional module name for the logger.
        log_dir (str): Directory where log files are saved. Defaults to the
            configured log directory; an empty string disables file logging.

    Returns:
        logging.Logger: Configured logger instance.

    """
    directory = LOG_DIR if log_dir is None else log_dir

    logger = logging.getLogger(name or __name__)
    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    if not logger.handlers:
        formatter = logging.Formatter(
            "%(asctime)s [%(levelname)s] %(name)s - %(message)s", "%Y-%m-%d %H:%M:%S"
        )

        # File handler (capture everything)
        if directory:
            os.makedirs(directory, exist_ok=True)
            log_file = os.path.join(directory, f"{datetime.now():%Y-%m-%d}.log")
            file_handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

        # Console handler on stderr, stdout is reserved for command output
        console_handler = logging.StreamHandler()
        console_handler.setLevel(getattr(logging, LOG_LEVEL, logging.WARNING))
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)
        _console_handlers.append(console_handler)

    return logger


def set_console_level(level: int) -> None:
    """Change the console level of every logger created so far."""
    for handler in _console_handlers:
        handler.setLevel(level)
