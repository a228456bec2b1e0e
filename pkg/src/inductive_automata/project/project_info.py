"""
Project banner and per-command logs.

Every CLI command runs under log_project_info. It prints a one-line banner to
stderr. With INDUCTIVE_AUTOMATA_DEBUG set it also keeps a command log under
logs/ holding the parsed arguments, the exit code, the duration and, on
failure, the traceback.
"""

import os
import platform
import sys
import time
import traceback
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Any, Dict, Optional

from .._version import __version__ as PROJECT_VERSION
from ..constants import DEBUG_ENV_VAR, LOGS_DIRECTORY

PROJECT_NAME = "inductive-automata"
PROJECT_DESCRIPTION = "Active learning of regular invariants and separators from incomplete teachers"

_RULE = "-" * 72


def _debug_enabled() -> bool:
    return os.environ.get(DEBUG_ENV_VAR, "").lower() in ("true", "1", "yes")


class CommandLog:
    """Plain-text log of one CLI command invocation."""

    def __init__(self, command: str, arguments: Dict[str, Any]):
        self.command = command
        self.arguments = arguments
        self.path: Optional[Path] = None

    def open(self) -> Optional[Path]:
        if not _debug_enabled():
            return None
        try:
            logs_dir = Path(LOGS_DIRECTORY)
            logs_dir.mkdir(exist_ok=True)
            stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            self.path = logs_dir / f"inductive_automata_{self.command}_{stamp}.log"
            lines = [
                f"{PROJECT_NAME} {PROJECT_VERSION} :: {self.command}",
                PROJECT_DESCRIPTION,
                _RULE,
                f"started   {datetime.now().isoformat(timespec='seconds')}",
                f"cwd       {os.getcwd()}",
                f"python    {platform.python_version()} on {sys.platform}",
            ]
            lines += [f"--{name.replace('_', '-')} {value}" for name, value in sorted(self.arguments.items())]
            lines.append(_RULE)
            self.path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as error:
            print(f"[WARNING] no command log for {self.command}: {error}", file=sys.stderr)
            self.path = None
        return self.path

    def write(self, message: str) -> None:
        if self.path is None:
            return
        try:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(message if message.endswith("\n") else message + "\n")
        except OSError as error:
            print(f"[LOG WRITE ERROR] {error}: {message.strip()}", file=sys.stderr)

    def finish(self, exit_code: int, seconds: float) -> None:
        self.write(f"{_RULE}\nexit code {exit_code} after {seconds:.2f}s")

    def fail(self, error: BaseException, seconds: float) -> None:
        self.write(f"{_RULE}\nfailed after {seconds:.2f}s: {error}\n{traceback.format_exc()}")


_current: Optional[CommandLog] = None


def _arguments_of(args: Any) -> Dict[str, Any]:
    values = vars(args) if hasattr(args, "__dict__") else {}
    return {
        name: value
        for name, value in values.items()
        if value not in (None, False) and not callable(value) and name != "command"
    }


def log_project_info(func):
    """Decorator for cmd_* handlers: banner, command log, timing."""

    @wraps(func)
    def wrapper(args, *rest, **kwargs):
        global _current

        command = func.__name__.removeprefix("cmd_")
        _current = CommandLog(command, _arguments_of(args))
        path = _current.open()

        print(f"{PROJECT_NAME} v{PROJECT_VERSION} [{command}]", file=sys.stderr)
        if path:
            print(f"Command log: {path}", file=sys.stderr)

        start = time.monotonic()
        try:
            exit_code = func(args, *rest, **kwargs)
        except Exception as error:
            _current.fail(error, time.monotonic() - start)
            print(f"\n[ERROR] {command} failed: {error}", file=sys.stderr)
            raise
        _current.finish(exit_code, time.monotonic() - start)
        return exit_code

    return wrapper


def append_to_universal_log(message: str) -> None:
    """Append a timestamped line to the running command's log, if any."""
    if _current is not None:
        _current.write(f"[{datetime.now().strftime('%H:%M:%S')}] {message}")


def log_simple_message(level: str, message: str, category: str = "general") -> None:
    """Fallback logger used when the logging module itself fails."""
    append_to_universal_log(f"[{level.upper()}] [{category}] {message}")
    print(f"[{level.upper()}] [{category}] {message}", file=sys.stderr)
