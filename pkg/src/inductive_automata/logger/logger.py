"""
Centralized logging module for the inductive_automata package.

Every module logs through log_message so that component and operation tags
stay uniform. File output is switched on by the INDUCTIVE_AUTOMATA_DEBUG
environment variable.
"""

import json
import logging
import os
import threading
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..constants import DEBUG_ENV_VAR, LOGS_DIRECTORY, PACKAGE_LOG_FILE
from ..project.project_info import log_simple_message

_LOGGER_NAME = "inductive_automata"
_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}
_handler_lock = threading.Lock()
_file_handler: Optional[logging.Handler] = None


class _TaggedFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        timestamp = datetime.fromtimestamp(record.created).strftime(
            "%Y-%m-%d %H:%M:%S"
        )
        component = getattr(record, "component", _LOGGER_NAME)
        operation = getattr(record, "operation", "general")
        return (
            f"[{timestamp}] [{record.levelname}] "
            f"[{component}:{operation}] {record.getMessage()}"
        )


def get_logger() -> logging.Logger:
    """Return the package logger, attaching the debug file handler on demand."""
    global _file_handler

    logger = logging.getLogger(_LOGGER_NAME)
    if _file_handler is None and is_logging_enabled_from_config():
        with _handler_lock:
            if _file_handler is None:
                logs_dir = Path(LOGS_DIRECTORY)
                logs_dir.mkdir(exist_ok=True)
                handler = logging.FileHandler(
                    logs_dir / PACKAGE_LOG_FILE, encoding="utf-8"
                )
                handler.setFormatter(_TaggedFormatter())
                logger.addHandler(handler)
                logger.setLevel(logging.DEBUG)
                _file_handler = handler
    return logger


def log_message(
    level: str,
    message: str,
    operation: str = "general",
    component: str = "inductive_automata",
    **kwargs: Any,
) -> None:
    """Log message with level, operation, and component."""
    try:
        logger = get_logger()
        numeric_level = _LEVELS.get(level.lower(), logging.INFO)
        if not logger.isEnabledFor(numeric_level):
            return
        if kwargs:
            message = f"{message} {json.dumps(kwargs, default=str, sort_keys=True)}"
        logger.log(
            numeric_level,
            message,
            extra={"component": component, "operation": operation},
        )
    except Exception:
        # the logging backend is broken; keep errors visible on stderr
        if level.lower() in ("error", "critical"):
            log_simple_message(level, message, f"{component}:{operation}")


def create_step_log_file(step_name: str) -> tuple[Optional[str], Optional[Any]]:
    """Create log file for processing step only if logging is enabled."""
    try:
        if not is_logging_enabled_from_config():
            return None, None

        logs_dir = Path(LOGS_DIRECTORY)
        logs_dir.mkdir(exist_ok=True)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        log_filepath = logs_dir / f"{step_name}_{timestamp}.log"

        log_file_handle = open(log_filepath, "w", encoding="utf-8")

        return str(log_filepath), log_file_handle
    except Exception:
        return None, None


def safe_log_write(file_handle: Optional[Any], message: str) -> None:
    """Safely write message to log file."""
    if file_handle:
        try:
            file_handle.write(message)
            file_handle.flush()
        except (OSError, IOError):
            pass


def safe_log_close(file_handle: Optional[Any]) -> None:
    """Safely close log file handle."""
    if file_handle:
        try:
            file_handle.close()
        except (OSError, IOError):
            pass


def is_logging_enabled_from_config() -> bool:
    """Check if debug file logging is enabled."""
    try:
        return os.environ.get(DEBUG_ENV_VAR, "").lower() in ("true", "1", "yes")
    except Exception:
        return False


class RunLog:
    """Structured learner event log, one JSON object per event."""

    def __init__(self, path: Optional[str] = None, component: str = "learner"):
        self.events: List[Dict[str, Any]] = []
        self.component = component
        self._handle = None
        if path:
            self._handle = open(path, "w", encoding="utf-8")

    def record(self, event: str, **fields: Any) -> None:
        entry = {"seq": len(self.events), "event": event, **fields}
        self.events.append(entry)
        log_message("debug", f"{event}", "run_log", self.component, **fields)
        safe_log_write(self._handle, json.dumps(entry, default=str) + "\n")

    def of_kind(self, event: str) -> List[Dict[str, Any]]:
        return [entry for entry in self.events if entry["event"] == event]

    def close(self) -> None:
        safe_log_close(self._handle)
        self._handle = None
