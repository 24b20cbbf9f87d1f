"""Tests for groupsim.core.logging module."""

from __future__ import annotations

import json
import logging

import pytest

from groupsim.core import (
    JSONFormatter,
    LogContext,
    RunLedger,
    clear_correlation_id,
    generate_correlation_id,
    get_correlation_id,
    get_logger,
    mask_sensitive,
    redact_headers,
    setup_logging,
)
from groupsim.core.logging import LEDGER_LOGGER, ROOT_LOGGER, STANDARD_FORMAT


class TestCorrelationID:
    """Tests for correlation ID management."""

    def setup_method(self):
        clear_correlation_id()

    def test_generate_correlation_id(self):
        """Generated IDs should be 8 characters."""
        assert len(generate_correlation_id()) == 8

    def test_get_returns_same(self):
        assert get_correlation_id() == get_correlation_id()

    def test_clear_mints_a_new_id(self):
        first = get_correlation_id()
        clear_correlation_id()
        assert get_correlation_id() != first


class TestLogContext:
    """Tests for LogContext context manager."""

    def setup_method(self):
        clear_correlation_id()

    def test_logs_start_and_completion(self, caplog):
        logger = get_logger("tests.context")
        with caplog.at_level(logging.INFO, logger=ROOT_LOGGER):
            with LogContext("run_simulation", logger, scenario="event_02") as ctx:
                logger.info("Stepping day 1")
        messages = [r.getMessage() for r in caplog.records]
        assert messages[0] == "Starting run_simulation"
        assert messages[-1].startswith("Completed run_simulation")
        assert ctx.context == {"operation": "run_simulation", "scenario": "event_02"}
        assert ctx.duration_ms >= 0.0

    def test_failure_is_logged_and_reraised(self, caplog):
        logger = get_logger("tests.context")
        with caplog.at_level(logging.INFO, logger=ROOT_LOGGER):
            with pytest.raises(ValueError):
                with LogContext("evaluate", logger):
                    raise ValueError("boom")
        assert any(r.levelno == logging.ERROR and "boom" in r.getMessage() for r in caplog.records)

    def test_restores_correlation_id(self):
        with LogContext("outer", log_entry_exit=False, correlation_id="outer000"):
            with LogContext("inner", log_entry_exit=False, correlation_id="inner000"):
                assert get_correlation_id() == "inner000"
            assert get_correlation_id() == "outer000"


class TestRunLedger:
    """Tests for the run ledger."""

    def test_record_is_json(self, caplog):
        with caplog.at_level(logging.INFO, logger=LEDGER_LOGGER):
            with LogContext("run", log_entry_exit=False, correlation_id="ledger01"):
                RunLedger().record(
                    "run_simulation",
                    scenario="event_02",
                    seed=0,
                    details={"agents": 16},
                    duration_ms=12.345,
                )
        entry = json.loads(caplog.records[-1].getMessage())
        assert entry["operation"] == "run_simulation"
        assert entry["seed"] == 0
        assert entry["correlation_id"] == "ledger01"
        assert entry["duration_ms"] == 12.35
        assert entry["success"] is True

    def test_failure_logs_warning(self, caplog):
        with caplog.at_level(logging.INFO, logger=LEDGER_LOGGER):
            RunLedger().record("replicate", success=False, error="oracle down")
        record = caplog.records[-1]
        assert record.levelno == logging.WARNING
        assert json.loads(record.getMessage())["error"] == "oracle down"


class TestFormatters:
    """Tests for the log formatters."""

    def _record(self) -> logging.LogRecord:
        record = logging.LogRecord("groupsim.x", logging.INFO, __file__, 1, "hi %s", ("x",), None)
        record.correlation_id = "abcd1234"  # type: ignore[attr-defined]
        record.seed = 3  # type: ignore[attr-defined]
        return record

    def test_json_formatter(self):
        data = json.loads(JSONFormatter().format(self._record()))
        assert data["message"] == "hi x"
        assert data["correlation_id"] == "abcd1234"
        assert data["extra"] == {"seed": 3}

    def test_standard_format(self):
        text = logging.Formatter(STANDARD_FORMAT).format(self._record())
        assert "[abcd1234]" in text
        assert text.endswith("groupsim.x: hi x")


class TestSetupLogging:
    def test_handlers_installed(self):
        setup_logging("DEBUG", json_output=True)
        root = logging.getLogger(ROOT_LOGGER)
        assert root.level == logging.DEBUG
        assert isinstance(root.handlers[0].formatter, JSONFormatter)
        assert logging.getLogger(LEDGER_LOGGER).handlers

    def test_get_logger_namespaces(self):
        assert get_logger("runtime").name == "groupsim.runtime"
        assert get_logger("groupsim.oracle").name == "groupsim.oracle"


class TestMasking:
    """Tests for secret masking helpers."""

    def test_mask_sensitive(self):
        assert mask_sensitive("sk-abcdefgh") == "*******efgh"
        assert mask_sensitive("abc") == "****"
        assert mask_sensitive("") == "****"

    def test_redact_headers(self):
        headers = {"Authorization": "Bearer sk-1234567890", "X-Correlation-ID": "abcd1234"}
        result = redact_headers(headers)
        assert result["Authorization"] == "*" * 16 + "7890"
        assert result["X-Correlation-ID"] == "abcd1234"
        assert headers["Authorization"] == "Bearer sk-1234567890"
