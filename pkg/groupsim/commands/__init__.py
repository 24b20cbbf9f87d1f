from __future__ import annotations

import argparse

from .agents import register as register_agents
from .evaluate import register as register_evaluate
from .fixtures import register as register_fixtures
from .simulate import register as register_simulate


def register_all(subparsers: argparse._SubParsersAction) -> None:
    """Register all CLI command groups."""
    register_agents(subparsers)
    register_simulate(subparsers)
    register_evaluate(subparsers)
    register_fixtures(subparsers)


__all__ = ["register_all"]
