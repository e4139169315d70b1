from __future__ import annotations

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
import sys

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
NOISY_LOGGERS = ("matplotlib", "PIL")


def setup_logging(level: str, log_file: str = "") -> None:
    """Console logging on stderr, plus a rotating file when ``log_file`` is set.

    stdout carries only command results, so logs never mix into them.
    """
    root = logging.getLogger()
    if root.handlers:
        return

    resolved = level.upper()
    root.setLevel(resolved)
    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(resolved)
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)

    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(max(logging.WARNING, root.level))

    if not log_file:
        return

    file_path = Path(log_file)
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(file_path, maxBytes=2 * 1024 * 1024, backupCount=3, encoding="utf-8")
    except OSError as exc:
        root.warning("Log file unavailable path=%s error=%s; console logging only", file_path, exc)
        return
    file_handler.setLevel(resolved)
    file_handler.setFormatter(formatter)
    root.addHandler(file_handler)
