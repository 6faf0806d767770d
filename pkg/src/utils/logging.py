import logging
import os
import sys
from typing import IO, Optional

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(filename)s:%(lineno)d | %(message)s"
DATE_FORMAT = "%d-%m-%Y %H:%M:%S"


class ColoredFormatter(logging.Formatter):
    """Formatter that tints the whole record by level"""

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
        "RESET": "\033[0m",
    }

    def format(self, record):
        log_message = super().format(record)
        color = self.COLORS.get(record.levelname, self.COLORS["RESET"])
        return f"{color}{log_message}{self.COLORS['RESET']}"


def supports_color(stream: IO) -> bool:
    """
    Check if the given stream should receive ANSI colors.

    Args:
        stream: The stream log records are written to

    Returns:
        True if colors are supported, False otherwise
    """
    if os.getenv("FORCE_COLOR"):
        return True
    if os.getenv("NO_COLOR") or os.getenv("CI"):
        return False
    if not hasattr(stream, "isatty") or not stream.isatty():
        return False
    return os.getenv("TERM", "").lower() not in ("dumb", "unknown")


def setup_logging(
    level: str = "INFO",
    use_colors: Optional[bool] = None,
    stream: Optional[IO] = None,
) -> None:
    """
    Configure the root logger for a command-line run.

    Records go to stderr by default so CSV written to stdout stays clean.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        use_colors: Whether to use colored output (auto-detected if None)
        stream: Target stream (defaults to sys.stderr)
    """
    log_level = getattr(logging, level.upper(), logging.INFO)
    stream = stream if stream is not None else sys.stderr

    if use_colors is None:
        use_colors = supports_color(stream)

    formatter_cls = ColoredFormatter if use_colors else logging.Formatter
    handler = logging.StreamHandler(stream)
    handler.setFormatter(formatter_cls(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()
    root_logger.addHandler(handler)

    for noisy in ("numexpr", "matplotlib"):
        logging.getLogger(noisy).setLevel(logging.WARNING)


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Get a logger instance with the configured format.

    Args:
        name: Logger name (optional, defaults to the root logger)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
