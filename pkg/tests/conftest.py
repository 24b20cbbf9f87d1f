"""Shared fixtures for the groupsim test suite."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Generator

import pytest

from groupsim.config import RunConfig, default_run_config
from groupsim.core.logging import LEDGER_LOGGER, ROOT_LOGGER, clear_correlation_id
from groupsim.core.models import EventRecord
from groupsim.hierarchy import KnowledgeGraph, load_bundled_graph
from groupsim.oracle import OracleGateway, StubOracle
from groupsim.reporting import load_event

REPO_ROOT = Path(__file__).resolve().parent.parent
EVENTS_DIR = REPO_ROOT / "fixtures" / "events"


@pytest.fixture(autouse=True)
def _reset_logging() -> Generator[None, None, None]:
    """Undo setup_logging side effects so caplog keeps working."""
    yield
    for name in (ROOT_LOGGER, LEDGER_LOGGER):
        logger = logging.getLogger(name)
        logger.handlers.clear()
        logger.propagate = True
        logger.setLevel(logging.NOTSET)
    clear_correlation_id()


@pytest.fixture
def cfg() -> RunConfig:
    return default_run_config()


@pytest.fixture
def gateway(cfg: RunConfig) -> OracleGateway:
    return OracleGateway(StubOracle(seed=0, settings=cfg["stub"]), max_inflight=8)


@pytest.fixture
def graph() -> KnowledgeGraph:
    return load_bundled_graph()


@pytest.fixture
def event_02() -> EventRecord:
    return load_event(EVENTS_DIR / "event_02.json")


@pytest.fixture
def event_14() -> EventRecord:
    return load_event(EVENTS_DIR / "event_14.json")
