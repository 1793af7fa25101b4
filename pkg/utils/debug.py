"""Logging helpers shared by the simulator, the experiment runner and the results app.

Every message goes through the ``trotterqpe`` logger. Keyword context is
appended as ``key=value | key=value`` so that grid points and timings can be
grepped from ``logs/trotterqpe.log``.
"""

from __future__ import annotations

import logging
import sys
import time
from functools import wraps
from pathlib import Path
from typing import Any, Callable

# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

LOGGER_NAME = "trotterqpe"
LOG_DIR = Path(__file__).parent.parent / "logs"
LOG_FILE = LOG_DIR / f"{LOGGER_NAME}.log"

CONSOLE_FORMAT = "%(asctime)s | %(levelname)-8s | %(message)s"
FILE_FORMAT = "%(asctime)s | %(levelname)-8s | %(module)s.%(funcName)s | %(message)s"

_debug_mode = False


def is_debug_mode() -> bool:
    """True when the experiment config asked for ``debug=true``."""
    return _debug_mode


def get_log_level() -> int:
    return logging.DEBUG if _debug_mode else logging.INFO


def set_debug_mode(enabled: bool) -> None:
    """Apply the ``debug`` setting to the logger and its console handler.

    The file handler always records DEBUG.
    """
    global _debug_mode
    _debug_mode = bool(enabled)
    level = get_log_level()
    logger.setLevel(logging.DEBUG)
    for handler in logger.handlers:
        if not isinstance(handler, logging.FileHandler):
            handler.setLevel(level)


# ---------------------------------------------------------------------------
# Logger Setup
# ---------------------------------------------------------------------------

def _file_handler() -> logging.Handler | None:
    try:
        LOG_DIR.mkdir(exist_ok=True)
        handler = logging.FileHandler(LOG_FILE, encoding="utf-8")
    except OSError:
        return None
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def setup_logger(name: str = LOGGER_NAME) -> logging.Logger:
    """Return the named logger, attaching console and file handlers on first use."""
    configured = logging.getLogger(name)
    if configured.handlers:
        return configured

    configured.setLevel(logging.DEBUG)
    console = logging.StreamHandler(sys.stdout)
    console.setLevel(get_log_level())
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt="%H:%M:%S"))
    configured.addHandler(console)

    handler = _file_handler()
    if handler is not None:
        configured.addHandler(handler)
    return configured


logger = setup_logger()


# ---------------------------------------------------------------------------
# Logging Functions
# ---------------------------------------------------------------------------

def _render(message: str, context: dict[str, Any]) -> str:
    if not context:
        return message
    return message + " " + " | ".join(f"{key}={value}" for key, value in context.items())


def log_debug(message: str, **context: Any) -> None:
    # skip rendering large arrays when nobody listens
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(_render(message, context))


def log_info(message: str, **context: Any) -> None:
    logger.info(_render(message, context))


def log_warning(message: str, **context: Any) -> None:
    logger.warning(_render(message, context))


def log_error(message: str, **context: Any) -> None:
    logger.error(_render(message, context))


# ---------------------------------------------------------------------------
# Decorators
# ---------------------------------------------------------------------------

def log_function_call(func: Callable) -> Callable:
    """Log entry, exit and failure of a pipeline command.

    Only keyword names are logged; positional arguments are usually configs or
    statevectors and are summarized by their type.
    """
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        name = func.__name__
        log_debug(f"CALL {name}", args=[type(a).__name__ for a in args], kwargs=sorted(kwargs))
        started = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as exc:
            log_error(f"ERROR {name}", error=f"{type(exc).__name__}: {exc}")
            raise
        log_debug(f"RETURN {name}", seconds=f"{time.perf_counter() - started:.3f}")
        return result
    return wrapper


# ---------------------------------------------------------------------------
# Log Reader
# ---------------------------------------------------------------------------

def read_recent_logs(lines: int = 100) -> list[str]:
    """Tail of the log file for the results app."""
    try:
        content = LOG_FILE.read_text(encoding="utf-8").splitlines(keepends=True)
    except FileNotFoundError:
        return ["No log file found."]
    except OSError as exc:
        return [f"Error reading logs: {exc}"]
    return content[-lines:]


# ---------------------------------------------------------------------------
# Timing
# ---------------------------------------------------------------------------

class Timer:
    """Context manager measuring one simulation step with ``perf_counter``.

    The elapsed time is logged at DEBUG together with any *context* keywords.
    """

    def __init__(self, name: str = "step", /, **context: Any) -> None:
        self.name = name
        self.context = context
        self._started: float | None = None
        self._stopped: float | None = None

    def __enter__(self) -> Timer:
        self._started = time.perf_counter()
        self._stopped = None
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self._stopped = time.perf_counter()
        log_debug(f"TIMER {self.name}", elapsed_ms=f"{self.elapsed_ms:.2f}", **self.context)

    @property
    def elapsed_seconds(self) -> float:
        if self._started is None or self._stopped is None:
            return 0.0
        return self._stopped - self._started

    @property
    def elapsed_ms(self) -> float:
        return 1000.0 * self.elapsed_seconds
