"""Artefact readers and writers.

Every file a command writes lands in one output directory next to the
``config.json`` that produced it, so any run can be replayed from its
outputs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from .config import RunConfig, config_to_dict
from .core.exceptions import ArtifactIOError, ValidationError
from .core.logging import get_logger
from .core.models import ACTION_FIELDS, EventRecord, event_from_json
from .core.validation import validate_output_dir, validate_path_exists
from .metrics import MetricReport
from .services.evaluation import evaluate_traces
from .services.runtime import (
    TRACE_SCHEMA_VERSION,
    ReplicationSet,
    SimulationTrace,
    summarize_replications,
)

TRACE_FILE = "trace.json"
DAILY_TOTALS_FILE = "daily_totals.csv"
ENGAGEMENTS_FILE = "engagements.csv"
METRICS_FILE = "metrics.json"
CONFIG_FILE = "config.json"

DAILY_TOTALS_COLUMNS = ("seed", "day", "date", *ACTION_FIELDS)
ENGAGEMENT_COLUMNS = ("seed", "event_id", "day", "agent_id", *ACTION_FIELDS)
TABLE_COLUMNS = ("Event", "t-test", "MAPE", "DTW Mean", "DTW Std", "Z-score")

log = get_logger(__name__)

PathLike = Union[str, Path]


# =============================================================================
# Low-level I/O
# =============================================================================


def _read_text(path: PathLike, description: str = "input file") -> str:
    p = validate_path_exists(path, must_be_file=True, description=description)
    try:
        return p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(str(p), exc.strerror or str(exc)) from exc


def _write_text(path: Path, text: str) -> Path:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(str(path), exc.strerror or str(exc)) from exc
    log.debug("Wrote %s", path)
    return path


def write_json(path: Path, data: Any) -> Path:
    """Pretty, key-sorted JSON with a trailing newline."""
    return _write_text(path, json.dumps(data, sort_keys=True, indent=2, default=str) + "\n")


def _write_csv(path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row[c] for c in columns})
    return _write_text(path, buffer.getvalue())


# =============================================================================
# Readers
# =============================================================================


def load_event(path: PathLike) -> EventRecord:
    """Read and validate one benchmark event file.

    Raises:
        PathValidationError: If the path is not an existing file.
        ArtifactIOError: If the file cannot be read.
        MalformedEvent: If the JSON is broken or a field is invalid.
    """
    return event_from_json(_read_text(path, "event file"))


def load_events(paths: Iterable[PathLike]) -> list[EventRecord]:
    return [load_event(p) for p in paths]


def read_json(path: PathLike) -> Any:
    """Parse a JSON file; broken JSON is a ValidationError."""
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"Invalid JSON at line {exc.lineno}: {exc.msg}",
            details={"path": str(path)},
            operation="read_json",
        ) from exc


def load_traces(path: PathLike) -> list[SimulationTrace]:
    """Read a trace file holding either one trace or a replication set."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise ValidationError("Trace file must hold a JSON object", operation="load_trace")
    if "traces" in data:
        return [SimulationTrace.from_dict(t) for t in data["traces"]]
    return [SimulationTrace.from_dict(data)]


# =============================================================================
# Row builders
# =============================================================================


def daily_total_rows(traces: Sequence[SimulationTrace]) -> list[dict[str, Any]]:
    rows: list[dict[str, Any]] = []
    for trace in traces:
        for day, totals in enumerate(trace.daily_totals, start=1):
            row: dict[str, Any] = {"seed": trace.seed, "day": day, "date": totals.date.isoformat()}
            row.update(zip(ACTION_FIELDS, totals.counts()))
            rows.append(row)
    return rows


def engagement_table_rows(traces: Sequence[SimulationTrace]) -> list[dict[str, Any]]:
    return [{"seed": t.seed, **row} for t in traces for row in t.engagement_rows()]


# =============================================================================
# Writers
# =============================================================================


def write_trace(traces: Union[SimulationTrace, ReplicationSet], outdir: PathLike) -> Path:
    target = validate_output_dir(outdir)
    return _write_text(target / TRACE_FILE, traces.to_json())


def write_daily_totals(traces: Sequence[SimulationTrace], outdir: PathLike) -> Path:
    target = validate_output_dir(outdir)
    return _write_csv(target / DAILY_TOTALS_FILE, DAILY_TOTALS_COLUMNS, daily_total_rows(traces))


def write_engagements(traces: Sequence[SimulationTrace], outdir: PathLike) -> Path:
    target = validate_output_dir(outdir)
    return _write_csv(
        target / ENGAGEMENTS_FILE, ENGAGEMENT_COLUMNS, engagement_table_rows(traces)
    )


def write_metrics(
    report: Union[MetricReport, Sequence[MetricReport]],
    outdir: PathLike,
    *,
    aggregate: Optional[MetricReport] = None,
) -> Path:
    target = validate_output_dir(outdir)
    payload: dict[str, Any] = {"schema_version": TRACE_SCHEMA_VERSION}
    if isinstance(report, MetricReport):
        payload.update(report.to_dict())
    else:
        payload["events"] = [r.to_dict() for r in report]
    if aggregate is not None:
        payload["aggregate"] = aggregate.to_dict()
    return write_json(target / METRICS_FILE, payload)


def write_event(event: EventRecord, outdir: PathLike) -> Path:
    target = validate_output_dir(outdir)
    return write_json(target / f"{event.id}.json", event.to_dict())


def write_config(cfg: RunConfig, outdir: PathLike, **extra: Any) -> Path:
    """Write the effective config plus command arguments for replay."""
    target = validate_output_dir(outdir)
    data = config_to_dict(cfg)
    if extra:
        data["command"] = extra
    return write_json(target / CONFIG_FILE, data)


@dataclass(frozen=True)
class EmittedReport:
    report: MetricReport
    paths: dict[str, Path] = field(default_factory=dict)


def emit_report(
    traces: Union[ReplicationSet, SimulationTrace, Sequence[SimulationTrace]],
    event: EventRecord,
    outdir: PathLike,
    *,
    cfg: Optional[RunConfig] = None,
) -> EmittedReport:
    """Evaluate ``traces`` against ``event`` and write every artefact.

    Writes trace.json, daily_totals.csv, engagements.csv, metrics.json and,
    when ``cfg`` is given, config.json.

    Raises:
        ValidationError: If no trace is complete.
        PathValidationError: If ``outdir`` cannot be created or written to.
        ArtifactIOError: If a file cannot be written.
    """
    if isinstance(traces, ReplicationSet):
        container: Union[SimulationTrace, ReplicationSet] = traces
        trace_list = list(traces.traces)
    elif isinstance(traces, SimulationTrace):
        container = traces
        trace_list = [traces]
    else:
        trace_list = list(traces)
        if not trace_list:
            raise ValidationError("No trace to report", operation="emit_report")
        if len(trace_list) == 1:
            container = trace_list[0]
        else:
            totals, summary = summarize_replications(trace_list)
            container = ReplicationSet(
                trace_list[0].scenario_id, tuple(trace_list), totals, summary
            )

    reproducibility = None
    if isinstance(container, ReplicationSet):
        reproducibility = container.summary.get("views")
    report = evaluate_traces(trace_list, event, reproducibility=reproducibility)
    paths = {
        "trace": write_trace(container, outdir),
        "daily_totals": write_daily_totals(trace_list, outdir),
        "engagements": write_engagements(trace_list, outdir),
        "metrics": write_metrics(report, outdir),
    }
    if cfg is not None:
        paths["config"] = write_config(cfg, outdir, event=event.id)
    log.info("Wrote %d artefacts to %s", len(paths), Path(outdir).expanduser())
    return EmittedReport(report=report, paths=paths)


# =============================================================================
# Table
# =============================================================================


def _fmt(value: Optional[float], spec: str) -> str:
    if value is None:
        return "n/a"
    return format(value, spec)


def report_row(report: MetricReport) -> tuple[str, ...]:
    return (
        report.label,
        _fmt(report.t_statistic, ".3f"),
        f"{_fmt(report.mape_percent, '.2f')}%",
        _fmt(report.dtw_mean, ".4f"),
        _fmt(report.dtw_std, ".4f"),
        _fmt(report.z_mean, ".3f"),
    )


def format_metrics_table(reports: Sequence[MetricReport]) -> str:
    """Plain-text table: Event | t-test | MAPE | DTW Mean | DTW Std | Z-score."""
    rows = [TABLE_COLUMNS, *(report_row(r) for r in reports)]
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    lines = [" | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


__all__ = [
    "EmittedReport",
    "load_event",
    "load_events",
    "load_traces",
    "read_json",
    "daily_total_rows",
    "engagement_table_rows",
    "write_trace",
    "write_daily_totals",
    "write_engagements",
    "write_metrics",
    "write_event",
    "write_json",
    "write_config",
    "emit_report",
    "format_metrics_table",
    "report_row",
]
