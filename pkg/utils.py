import logging
import os
import sys
from pathlib import Path
from typing import Optional

from constants import EnvVars, OutputConstants


class FlushStreamHandler(logging.StreamHandler):
    """
    StreamHandler that flushes the stream after every log record.
    Keeps the progress counter in step with long sweeps.
    """
    def emit(self, record):
        try:
            super().emit(record)
            self.flush()
        except Exception:
            self.handleError(record)


def resolve_log_level(default: int = logging.INFO) -> int:
    """Log level from LC_LOG_LEVEL, falling back to the default."""
    name = os.getenv(EnvVars.LOG_LEVEL)
    if not name:
        return default
    level = logging.getLevelName(name.strip().upper())
    return level if isinstance(level, int) else default


def setup_logger(name: str = "spacing_complexity", log_level: Optional[int] = None) -> logging.Logger:
    """
    Configure and return a logger instance.
    Records go to stderr; stdout carries CSV and tables.
    """
    logger = logging.getLogger(name)

    # If logger already has handlers, assume it's configured
    if logger.handlers:
        return logger

    level = resolve_log_level() if log_level is None else log_level
    logger.setLevel(level)

    console_handler = FlushStreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)
    logger.propagate = False

    return logger


def set_global_level(level: int) -> None:
    """Apply a level to every logger created through setup_logger."""
    for logger in logging.Logger.manager.loggerDict.values():
        if isinstance(logger, logging.Logger) and any(
            isinstance(h, FlushStreamHandler) for h in logger.handlers
        ):
            logger.setLevel(level)


def get_output_dir() -> Path:
    """Default directory for result files (LC_OUTPUT_DIR overrides)."""
    return Path(os.getenv(EnvVars.OUTPUT_DIR) or OutputConstants.DEFAULT_OUTPUT_DIR)
