"""Arguments and wiring shared by every sub-command."""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any, Optional

from ..config import RunConfig, load_run_config
from ..core.validation import parse_seed_input, validate_option_list
from ..hierarchy import KnowledgeGraph, load_bundled_graph
from ..oracle import OracleGateway
from ..services import SimulationRuntime


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        dest="config_file",
        type=Path,
        default=None,
        help="Path to a JSON run config (see config/run.example.json)",
    )
    parser.add_argument(
        "--env",
        dest="env_file",
        type=Path,
        default=None,
        help="Path to .env file that overrides environment variables",
    )
    parser.add_argument(
        "--graph",
        dest="graph_dir",
        type=Path,
        default=None,
        help="Knowledge-graph directory (default: the bundled group trees)",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")
    parser.add_argument(
        "--json-logs", action="store_true", help="Emit logs as JSON lines on stderr"
    )


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    """Options that override the run config for simulate, replicate and benchmark."""
    parser.add_argument("--layer", type=int, default=None, help="Group-tree layer (default: 1)")
    parser.add_argument("--horizon", type=int, default=None, help="Days to simulate (default: 7)")
    parser.add_argument(
        "--oracle",
        dest="oracle_mode",
        choices=["stub", "remote"],
        default=None,
        help="Oracle backend (default: stub)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Threads used for agents within one day (default: 1)",
    )
    parser.add_argument(
        "--output-dir",
        dest="output_dir",
        default=None,
        help="Directory artefacts are written to (default: runs)",
    )
    parser.add_argument(
        "--heat-schedule",
        dest="heat_schedule",
        default=None,
        help="Heat schedule name overriding the config for this scenario",
    )
    parser.add_argument(
        "--no-memory", action="store_true", help="Drop the memory term (ablation)"
    )
    parser.add_argument(
        "--no-state", action="store_true", help="Drop the persistence term (ablation)"
    )


def config_from_args(args: argparse.Namespace, **extra: Any) -> RunConfig:
    """Load the config file and apply command-line overrides."""
    overrides: dict[str, Any] = {
        "layer": getattr(args, "layer", None),
        "horizon": getattr(args, "horizon", None),
        "oracle_mode": getattr(args, "oracle_mode", None),
        "workers": getattr(args, "workers", None),
        "output_dir": getattr(args, "output_dir", None),
    }
    if getattr(args, "no_memory", False):
        overrides["use_memory"] = False
    if getattr(args, "no_state", False):
        overrides["use_state"] = False
    options = getattr(args, "options", None)
    if options:
        overrides["options"] = validate_option_list(options)
    seeds = getattr(args, "seeds", None)
    if seeds:
        overrides["seeds"] = parse_seed_input(seeds)
    overrides.update(extra)
    return load_run_config(args.config_file, args.env_file, overrides=overrides)


def load_graph(graph_dir: Optional[Path]) -> KnowledgeGraph:
    return KnowledgeGraph.load(graph_dir) if graph_dir else load_bundled_graph()


def build_runtime(cfg: RunConfig, graph_dir: Optional[Path]) -> SimulationRuntime:
    gateway = OracleGateway.from_config(cfg)
    return SimulationRuntime(load_graph(graph_dir), gateway, cfg)
