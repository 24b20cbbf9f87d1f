"""Run logging for groupsim.

Every record carries the correlation id of the run or oracle request it
belongs to. Console output is plain text or one JSON object per line, and
the run ledger writes one JSON line per finished simulation, replication
set, evaluation or graph write.

Usage:
    from groupsim.core.logging import setup_logging, get_logger, LogContext

    setup_logging(level="INFO", json_output=True)
    log = get_logger(__name__)

    with LogContext("run_simulation", log, scenario="event_02", seed=0):
        log.info("Stepping day 1")
"""

from __future__ import annotations

import contextvars
import json
import logging
import sys
import time
import uuid
from datetime import datetime, timezone
from typing import Any, Mapping, Optional, Union

ROOT_LOGGER = "groupsim"
LEDGER_LOGGER = "groupsim.ledger"

STANDARD_FORMAT = "%(asctime)s %(levelname)-8s [%(correlation_id)s] %(name)s: %(message)s"
SECRET_HEADERS = frozenset({"authorization", "x-api-key", "api-key"})

_correlation_id: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar(
    "correlation_id", default=None
)

_operation_context: contextvars.ContextVar[dict[str, Any]] = contextvars.ContextVar(
    "operation_context", default={}
)


# =============================================================================
# Correlation ID Management
# =============================================================================


def generate_correlation_id() -> str:
    return str(uuid.uuid4())[:8]


def get_correlation_id() -> str:
    """Current correlation id, minting one on first use in this context."""
    cid = _correlation_id.get()
    if cid is None:
        cid = generate_correlation_id()
        _correlation_id.set(cid)
    return cid


def clear_correlation_id() -> None:
    _correlation_id.set(None)


# =============================================================================
# Filter and Formatter
# =============================================================================


class ContextFilter(logging.Filter):
    """Stamp records with the correlation id and operation context."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.correlation_id = get_correlation_id()  # type: ignore[attr-defined]
        record.operation_context = _operation_context.get()  # type: ignore[attr-defined]
        return True


_RECORD_ATTRS = frozenset(
    logging.LogRecord("", 0, "", 0, "", None, None).__dict__
) | {"message", "correlation_id", "operation_context", "taskName"}


class JSONFormatter(logging.Formatter):
    """One JSON object per record; ``extra`` fields go under "extra"."""

    def format(self, record: logging.LogRecord) -> str:
        data: dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "correlation_id": getattr(record, "correlation_id", None),
        }
        op_ctx = getattr(record, "operation_context", {})
        if op_ctx:
            data["context"] = op_ctx
        if record.exc_info:
            data["exception"] = self.formatException(record.exc_info)
        extra = {k: v for k, v in record.__dict__.items() if k not in _RECORD_ATTRS}
        if extra:
            data["extra"] = extra
        return json.dumps(data, default=str)


# =============================================================================
# Run Ledger
# =============================================================================


class RunLedger:
    """One JSON line per completed unit of work.

    Records carry the correlation id so they can be joined with the regular
    log stream.

    Usage:
        get_run_ledger().record(
            "run_simulation",
            scenario="event_02",
            seed=7,
            details={"agents": 16, "days": 7},
        )
    """

    def __init__(self, logger_name: str = LEDGER_LOGGER) -> None:
        self.logger = logging.getLogger(logger_name)

    def record(
        self,
        operation: str,
        *,
        scenario: Optional[str] = None,
        seed: Optional[int] = None,
        country: Optional[str] = None,
        domain: Optional[str] = None,
        details: Optional[dict[str, Any]] = None,
        success: bool = True,
        error: Optional[str] = None,
        duration_ms: Optional[float] = None,
    ) -> None:
        entry: dict[str, Any] = {
            "ledger": True,
            "operation": operation,
            "success": success,
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "correlation_id": get_correlation_id(),
        }
        optional = {
            "scenario": scenario,
            "seed": seed,
            "country": country,
            "domain": domain,
            "details": details or None,
            "error": error,
        }
        entry.update({k: v for k, v in optional.items() if v is not None})
        if duration_ms is not None:
            entry["duration_ms"] = round(duration_ms, 2)

        level = logging.INFO if success else logging.WARNING
        self.logger.log(level, json.dumps(entry, default=str, sort_keys=True))


_run_ledger: Optional[RunLedger] = None


def get_run_ledger() -> RunLedger:
    global _run_ledger
    if _run_ledger is None:
        _run_ledger = RunLedger()
    return _run_ledger


# =============================================================================
# Context Manager for Operations
# =============================================================================


class LogContext:
    """Scope a block under an operation name and correlation id.

    Times the block and logs its start and completion unless
    ``log_entry_exit`` is False; failures are always logged and never
    suppressed.
    """

    def __init__(
        self,
        operation: str,
        logger: Optional[logging.Logger] = None,
        *,
        correlation_id: Optional[str] = None,
        log_entry_exit: bool = True,
        **context: Any,
    ) -> None:
        self.operation = operation
        self.logger = logger or logging.getLogger(ROOT_LOGGER)
        self.log_entry_exit = log_entry_exit
        self.context = {"operation": operation, **context}
        self.start_time = 0.0
        self.duration_ms = 0.0
        self.correlation_id = correlation_id or get_correlation_id()
        self._token: Optional[contextvars.Token[dict[str, Any]]] = None
        self._cid_token: Optional[contextvars.Token[Optional[str]]] = None

    def __enter__(self) -> "LogContext":
        self.start_time = time.perf_counter()
        self._token = _operation_context.set(self.context)
        self._cid_token = _correlation_id.set(self.correlation_id)
        if self.log_entry_exit:
            self.logger.info("Starting %s", self.operation)
        return self

    def __exit__(
        self,
        exc_type: Optional[type],
        exc_val: Optional[BaseException],
        exc_tb: Any,
    ) -> None:
        self.duration_ms = (time.perf_counter() - self.start_time) * 1000
        if exc_val is not None:
            self.logger.error(
                "%s failed after %.1fms: %s",
                self.operation,
                self.duration_ms,
                exc_val,
                exc_info=self.logger.isEnabledFor(logging.DEBUG),
            )
        elif self.log_entry_exit:
            self.logger.info("Completed %s in %.1fms", self.operation, self.duration_ms)

        if self._token is not None:
            _operation_context.reset(self._token)
        if self._cid_token is not None:
            _correlation_id.reset(self._cid_token)


# =============================================================================
# Setup Functions
# =============================================================================


def setup_logging(level: Union[int, str] = logging.INFO, *, json_output: bool = False) -> None:
    """Send groupsim and ledger records to stderr.

    Args:
        level: Logging level for the groupsim namespace.
        json_output: Emit one JSON object per record instead of plain text.
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)

    formatter: logging.Formatter
    if json_output:
        formatter = JSONFormatter()
    else:
        formatter = logging.Formatter(STANDARD_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    handler.setFormatter(formatter)
    handler.addFilter(ContextFilter())

    root_logger = logging.getLogger(ROOT_LOGGER)
    root_logger.setLevel(level)
    root_logger.handlers.clear()
    root_logger.addHandler(handler)
    root_logger.propagate = False

    ledger_logger = logging.getLogger(LEDGER_LOGGER)
    ledger_logger.setLevel(logging.INFO)
    ledger_logger.handlers.clear()
    ledger_logger.addHandler(handler)
    ledger_logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """Logger under the groupsim namespace."""
    if not name.startswith(ROOT_LOGGER):
        name = f"{ROOT_LOGGER}.{name}"
    return logging.getLogger(name)


# =============================================================================
# Secrets
# =============================================================================


def mask_sensitive(value: str, visible_chars: int = 4) -> str:
    """Mask a secret, keeping the last few characters ("****abcd")."""
    if not value or len(value) <= visible_chars:
        return "****"
    return "*" * (len(value) - visible_chars) + value[-visible_chars:]


def redact_headers(headers: Mapping[str, str]) -> dict[str, str]:
    """Copy of oracle request headers with credentials masked."""
    return {
        k: mask_sensitive(v) if k.lower() in SECRET_HEADERS else v for k, v in headers.items()
    }
