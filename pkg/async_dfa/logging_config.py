"""
Logging setup for the analyzer.

Every module obtains its logger through ``get_logger(__name__)`` and attaches
analysis context (engine, domain, target, node, procedure) through ``extra=``.
Records render as ``LEVEL | [logger] | message | key=value ...``; the console
copy goes to stderr so that reports on stdout stay machine readable.
"""

import logging
import logging.handlers
import os
import sys
from pathlib import Path
from typing import Optional, Union

DEBUG = logging.DEBUG
INFO = logging.INFO
WARNING = logging.WARNING
ERROR = logging.ERROR

LOG_ENV_VAR = "DFAS_LOG"

# rotate at 10MB, keep five files
LOG_FILE_BYTES = 10_485_760
LOG_FILE_BACKUPS = 5

CONTEXT_FIELDS = ("engine", "domain", "theta", "target", "node", "procedure", "model")

_ANSI = {
    "DEBUG": "\033[36m",
    "INFO": "\033[32m",
    "WARNING": "\033[33m",
    "ERROR": "\033[31m",
    "CRITICAL": "\033[35m",
}
_ANSI_RESET = "\033[0m"


class StructuredFormatter(logging.Formatter):
    """Pipe-separated records with the analysis context appended as ``key=value``."""

    def __init__(self, use_color: bool = True) -> None:
        super().__init__()
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        parts = [f"{record.levelname:8}", f"[{record.name}]", record.getMessage()]
        parts.extend(
            f"{name}={getattr(record, name)}"
            for name in CONTEXT_FIELDS
            if getattr(record, name, None) is not None
        )
        if record.exc_info:
            parts.append(self.formatException(record.exc_info))
        text = " | ".join(parts)

        if self.use_color and sys.stderr.isatty():
            return f"{_ANSI.get(record.levelname, '')}{text}{_ANSI_RESET}"
        return text


def level_from_env(default: int = WARNING) -> int:
    """
    Read the log level from ``DFAS_LOG``.

    Accepts level names ("debug", "INFO") or numbers; unknown values fall back
    to ``default``.
    """
    raw = (os.getenv(LOG_ENV_VAR) or "").strip()
    if not raw:
        return default
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw.upper())
    return level if isinstance(level, int) else default


def _file_handler(log_file: Path) -> logging.Handler:
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.handlers.RotatingFileHandler(
        log_file, maxBytes=LOG_FILE_BYTES, backupCount=LOG_FILE_BACKUPS, encoding="utf-8"
    )
    handler.setFormatter(StructuredFormatter(use_color=False))
    return handler


def setup_logging(
    level: Union[int, str, None] = None,
    log_file: Optional[Path] = None,
    use_color: bool = True,
) -> None:
    """
    Configure the root logger: one stderr handler plus an optional rotating file.

    Args:
        level: Minimum level (default: ``DFAS_LOG`` or WARNING)
        log_file: Also write records to this file
        use_color: Color console records when stderr is a terminal

    Example:
        >>> setup_logging(level=DEBUG, log_file=Path("logs/dfas.log"))
    """
    if level is None:
        level = level_from_env()

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(StructuredFormatter(use_color=use_color))
    handlers = [console]
    if log_file:
        handlers.append(_file_handler(log_file))

    root = logging.getLogger()
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    for handler in handlers:
        handler.setLevel(level)
        root.addHandler(handler)

    get_logger(__name__).debug("Logging initialized", extra={"target": str(log_file) if log_file else None})


def get_logger(name: str) -> logging.Logger:
    """
    Logger for one module (usually ``__name__``).

    Example:
        >>> logger = get_logger(__name__)
        >>> logger.info("Fixpoint reached", extra={"engine": "forward"})
    """
    return logging.getLogger(name)
