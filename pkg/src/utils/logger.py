"""
Logging configuration for the circulant curvature verifier
"""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger


def setup_logger(log_level: str = "INFO", log_file: Optional[Path] = None) -> logger:
    """
    Setup application logger with console and optional file output

    Reports are written to stdout, so the console sink goes to stderr.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Optional path of a rotating log file

    Returns:
        Configured logger instance
    """

    # Remove default handler
    logger.remove()
    logger.enable("src")

    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{extra[name]}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
        level=log_level,
        colorize=True,
    )

    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file,
            format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {extra[name]}:{function}:{line} - {message}",
            level=log_level,
            rotation="10 MB",
            retention="30 days",
            compression="zip",
        )

    return logger


def get_logger(name: Optional[str] = None) -> logger:
    """
    Get logger instance for a specific module

    Args:
        name: Module name

    Returns:
        Logger instance
    """
    return logger.bind(name=name or "circulant")


logger.configure(extra={"name": "circulant"})
