from __future__ import annotations

import argparse
import time
from pathlib import Path

from tqdm import tqdm

from ..core.logging import get_run_ledger
from ..fixtures import benchmark_suite
from ..metrics import MetricReport
from ..reporting import (
    format_metrics_table,
    load_event,
    load_traces,
    write_config,
    write_metrics,
)
from ..services import EventPair, Scenario, aggregate_reports, evaluate_traces, event_pair
from .common import add_common_arguments, add_run_arguments, build_runtime, config_from_args


def register(subparsers: argparse._SubParsersAction) -> None:
    evaluate = subparsers.add_parser(
        "evaluate",
        help="Score a trace file against an event's ground truth",
    )
    evaluate.add_argument("trace", type=Path, help="trace.json written by simulate or replicate")
    evaluate.add_argument("event", type=Path, help="Path to the event JSON file")
    evaluate.add_argument(
        "--mode",
        choices=["aligned", "warped"],
        default="aligned",
        help="Distance alignment: aligned (default) or dynamic time warping",
    )
    evaluate.add_argument(
        "--metric",
        choices=["abs", "squared"],
        default="abs",
        help="Pointwise distance (default: abs)",
    )
    evaluate.add_argument(
        "--output-dir",
        dest="output_dir",
        type=Path,
        default=None,
        help="Write metrics.json here (default: next to the trace)",
    )
    add_common_arguments(evaluate)

    def handle_evaluate(
        args: argparse.Namespace, parser: argparse.ArgumentParser = evaluate
    ) -> int:
        traces = load_traces(args.trace)
        event = load_event(args.event)
        report = evaluate_traces(traces, event, metric=args.metric, mode=args.mode)
        outdir = args.output_dir or args.trace.parent
        path = write_metrics(report, outdir)
        print(format_metrics_table([report]), end="")
        print(f"Metrics written to {path}")
        return 0

    evaluate.set_defaults(func=handle_evaluate)

    bench = subparsers.add_parser(
        "benchmark",
        help="Simulate and score synthetic events of every archetype",
    )
    bench.add_argument(
        "--per-archetype",
        type=int,
        default=10,
        help="Events per archetype (default: 10, i.e. 30 events)",
    )
    bench.add_argument(
        "--scale", type=int, default=10, help="Peak views in thousands (default: 10)"
    )
    bench.add_argument(
        "--seeds",
        default=None,
        help="Seeds per event as '0,1,2' or '0-4'; two or more adds Z-scores",
    )
    bench.add_argument("--no-progress", action="store_true", help="Hide the progress bar")
    add_run_arguments(bench)
    add_common_arguments(bench)

    def handle_benchmark(
        args: argparse.Namespace, parser: argparse.ArgumentParser = bench
    ) -> int:
        if args.per_archetype < 1:
            parser.error("--per-archetype must be at least 1")
        cfg = config_from_args(args)
        runtime = build_runtime(cfg, args.graph_dir)
        seeds = cfg["seeds"]
        started = time.perf_counter()

        reports: list[MetricReport] = []
        pairs: list[EventPair] = []
        suite = benchmark_suite(args.per_archetype, args.scale)
        for archetype, event in tqdm(
            suite, desc="benchmark", unit="event", disable=args.no_progress
        ):
            scenario = Scenario(
                event=event,
                layer=cfg["layer"],
                horizon_days=cfg["horizon"],
                heat_schedule=args.heat_schedule or archetype.value,
            )
            reproducibility = None
            if len(seeds) > 1:
                replication = runtime.replicate(scenario, seeds)
                traces = list(replication.traces)
                reproducibility = replication.summary.get("views")
            else:
                traces = [runtime.run(scenario, seeds[0])]
            reports.append(evaluate_traces(traces, event, reproducibility=reproducibility))
            pairs.append(event_pair(traces, event))

        aggregate = aggregate_reports(reports, pairs, label="aggregate")
        elapsed = time.perf_counter() - started
        outdir = Path(cfg["output_dir"])
        write_config(cfg, outdir, command="benchmark", per_archetype=args.per_archetype)
        write_metrics(reports, outdir, aggregate=aggregate)

        print(format_metrics_table([*reports, aggregate]), end="")
        if aggregate.t_total is not None:
            print(f"t-test on per-event totals: {aggregate.t_total:.3f}")
        print(f"{len(reports)} events in {elapsed:.2f}s; metrics written to {outdir}")
        get_run_ledger().record(
            "benchmark",
            details={"events": len(reports), "seeds": seeds},
            duration_ms=elapsed * 1000,
        )
        return 0

    bench.set_defaults(func=handle_benchmark)
