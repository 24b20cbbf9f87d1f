from __future__ import annotations

import argparse
from pathlib import Path
from typing import Optional

from ..config import RunConfig
from ..core.exceptions import ValidationError
from ..core.models import EventRecord, Sentiment
from ..reporting import (
    emit_report,
    format_metrics_table,
    load_event,
    read_json,
    write_config,
    write_trace,
)
from ..services import Scenario
from .common import add_common_arguments, add_run_arguments, build_runtime, config_from_args

EXIT_ORACLE_FAILURE = 3


def _scenario(args: argparse.Namespace, event: EventRecord, cfg: RunConfig) -> Scenario:
    seats: Optional[dict[str, int]] = None
    if args.seats:
        raw = read_json(args.seats)
        if not isinstance(raw, dict):
            raise ValidationError("Seats file must map agent ids to seats", operation="simulate")
        seats = {str(k): int(v) for k, v in raw.items()}
    return Scenario(
        event=event,
        layer=cfg["layer"],
        horizon_days=cfg["horizon"],
        options=tuple(cfg["options"]),
        heated=args.heated,
        heat_schedule=args.heat_schedule,
        sentiment=Sentiment(args.sentiment) if args.sentiment else None,
        seats=seats,
    )


def _add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("event", type=Path, help="Path to an event JSON file")
    parser.add_argument(
        "--options",
        default=None,
        help="Comma-separated prediction options; enables the predict round",
    )
    parser.add_argument(
        "--seats",
        default=None,
        help="JSON file mapping agent id to seats for a winner-take-all tally",
    )
    parser.add_argument(
        "--sentiment",
        choices=[s.value for s in Sentiment],
        default=None,
        help="Event sentiment overriding the config",
    )
    parser.add_argument(
        "--heated",
        action="store_true",
        help="Allow comments and shares to exceed likes",
    )
    add_run_arguments(parser)
    add_common_arguments(parser)


def register(subparsers: argparse._SubParsersAction) -> None:
    simulate = subparsers.add_parser(
        "simulate",
        help="Simulate one event with one seed and write trace, totals and metrics",
    )
    simulate.add_argument(
        "--seed", type=int, default=None, help="Run seed (default: first config seed)"
    )
    _add_scenario_arguments(simulate)

    def handle_simulate(
        args: argparse.Namespace, parser: argparse.ArgumentParser = simulate
    ) -> int:
        extra = {"seeds": [args.seed]} if args.seed is not None else {}
        cfg = config_from_args(args, **extra)
        event = load_event(args.event)
        scenario = _scenario(args, event, cfg)
        runtime = build_runtime(cfg, args.graph_dir)
        seed = cfg["seeds"][0]

        trace = runtime.run(scenario, seed)
        outdir = Path(cfg["output_dir"])
        write_config(cfg, outdir, command="simulate", event=str(args.event), seed=seed)
        if not trace.complete:
            write_trace(trace, outdir)
            print(f"Run stopped early: {trace.failure}")
            return EXIT_ORACLE_FAILURE

        emitted = emit_report(trace, event, outdir)
        print(format_metrics_table([emitted.report]), end="")
        if trace.outcome is not None:
            outcome = trace.outcome
            print(f"Predicted winner: {outcome.winner}")
            for option, share in outcome.support.items():
                print(f"  {option}: {share:.3f}")
        print(f"Artefacts written to {outdir}")
        return 0

    simulate.set_defaults(func=handle_simulate)

    replicate = subparsers.add_parser(
        "replicate",
        help="Simulate one event under several seeds and report Z-scores",
    )
    replicate.add_argument(
        "--seeds",
        default="0-4",
        help="Seeds as '0,1,2' or an inclusive range '0-4' (default: 0-4)",
    )
    replicate.add_argument(
        "--no-progress", action="store_true", help="Hide the progress bar"
    )
    _add_scenario_arguments(replicate)

    def handle_replicate(
        args: argparse.Namespace, parser: argparse.ArgumentParser = replicate
    ) -> int:
        cfg = config_from_args(args)
        event = load_event(args.event)
        scenario = _scenario(args, event, cfg)
        runtime = build_runtime(cfg, args.graph_dir)

        replication = runtime.replicate(scenario, cfg["seeds"], progress=not args.no_progress)
        outdir = Path(cfg["output_dir"])
        write_config(cfg, outdir, command="replicate", event=str(args.event))
        if not any(t.complete for t in replication.traces):
            write_trace(replication, outdir)
            print("Every replicate stopped early:")
            for trace in replication.traces:
                print(f"  seed {trace.seed}: {trace.failure}")
            return EXIT_ORACLE_FAILURE

        emitted = emit_report(replication, event, outdir)
        print(format_metrics_table([emitted.report]), end="")
        views = replication.summary.get("views")
        if views is not None:
            print(
                f"Views Z-score: max |z| {views.max_abs:.3f}, "
                f"replicate mean {views.z_mean:+.3f} ({views.label})"
            )
        failed = [t for t in replication.traces if not t.complete]
        for trace in failed:
            print(f"  seed {trace.seed} incomplete: {trace.failure}")
        print(f"Artefacts written to {outdir}")
        return EXIT_ORACLE_FAILURE if failed else 0

    replicate.set_defaults(func=handle_replicate)
