"""
Logging configuration for Multiscatter.

All module loggers live under the "multiscatter" namespace. The console handler writes
through tqdm inside progress_logging(), so log lines emitted by worker threads land
above the kernel's progress bars instead of breaking them.
"""

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

from tqdm.contrib.logging import logging_redirect_tqdm

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(threadName)s | %(name)s | %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
CONSOLE_FORMAT = "%(levelname)-8s | %(message)s"

ROOT_LOGGER_NAME = "multiscatter"


def setup_logging(verbose: bool = False, log_file: Path | None = None) -> logging.Logger:
    """
    Configure the multiscatter logger tree and return its root.

    Args:
        verbose: DEBUG level and the detailed format (with worker thread names) on the console
        log_file: Optional file that receives every record at the detailed format

    Returns:
        The configured "multiscatter" logger
    """
    level = logging.DEBUG if verbose else logging.INFO
    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(level)
    root.handlers.clear()

    console = logging.StreamHandler(sys.stdout)
    console.setFormatter(logging.Formatter(LOG_FORMAT if verbose else CONSOLE_FORMAT, LOG_DATE_FORMAT))
    root.addHandler(console)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
        root.addHandler(file_handler)
    return root


@contextmanager
def progress_logging() -> Iterator[None]:
    """Send console records through tqdm.write while progress bars may be on screen."""
    with logging_redirect_tqdm(loggers=[logging.getLogger(ROOT_LOGGER_NAME)]):
        yield


def get_logger(name: str) -> logging.Logger:
    """
    Logger for a module, inside the multiscatter namespace.

    Usage:
        logger = get_logger(__name__)
        logger.info("Sweep point %d/%d: %.1f dB", i, n, snr_db)
        logger.warning("Clamped %d distances to the reference distance", count)
    """
    if name != ROOT_LOGGER_NAME and not name.startswith(f"{ROOT_LOGGER_NAME}."):
        name = f"{ROOT_LOGGER_NAME}.{name}"
    return logging.getLogger(name)
