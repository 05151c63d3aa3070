# src/utils/log.py
"""
Logging setup shared by the library and the CLI.

Lines read "[INFO] ...", "[WARNING] ..." in ASCII and can also be
appended to a log file.
"""
from __future__ import annotations

import logging
from pathlib import Path

from .config import get_settings

_ROOT = "felkit"
_FORMAT = "[%(levelname)s] %(message)s"


class _AsciiFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        return super().format(record).encode("ascii", "replace").decode("ascii")


def _root() -> logging.Logger:
    logger = logging.getLogger(_ROOT)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(_AsciiFormatter(_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(get_settings().log_level)
        logger.propagate = False
    return logger


def get_logger(name: str) -> logging.Logger:
    """Child logger of the package root, e.g. get_logger(__name__)."""
    _root()
    short = name[4:] if name.startswith("src.") else name
    return logging.getLogger(f"{_ROOT}.{short}")


def configure(level: str | int | None = None, log_path: Path | None = None) -> logging.Logger:
    """Adjust level and optionally append to `log_path` (used by the CLI)."""
    logger = _root()
    if level is not None:
        logger.setLevel(level)
    if log_path is not None:
        target = str(log_path.resolve())
        if any(getattr(h, "baseFilename", None) == target for h in logger.handlers):
            return logger
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(log_path, mode="a", encoding="ascii", errors="replace")
        handler.setFormatter(_AsciiFormatter("%(asctime)s " + _FORMAT))
        logger.addHandler(handler)
    return logger
