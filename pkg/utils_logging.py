"""Logging helpers shared by the CLI, the sweep worker and local runs.

Call `configure_logging()` once at process start; library modules only
create named loggers and never attach handlers themselves.
"""
import logging
from typing import Optional


def configure_logging(level: Optional[str] = None) -> None:
    """Configure the root logger for the application.

    Args:
        level: Logging level name (e.g., "DEBUG", "INFO"). Defaults to the
            `KHESSIAN_LOG_LEVEL` setting from `core.config`.
    """
    if level is None:
        from core.config import LOG_LEVEL

        level = LOG_LEVEL
    fmt = "%(asctime)s %(levelname)s %(name)s - %(message)s"
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=fmt)
    # scipy's integration warnings are surfaced through our own diagnostics
    logging.getLogger("py.warnings").setLevel(logging.ERROR)


def get_logger(name: str) -> logging.Logger:
    """Return a named logger for the caller module."""
    return logging.getLogger(name)
