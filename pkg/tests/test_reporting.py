"""Tests for groupsim.reporting."""

from __future__ import annotations

import csv
import json
import math

import pytest

from groupsim.core.exceptions import MalformedEvent, PathValidationError, ValidationError
from groupsim.fixtures import make_fixture
from groupsim.metrics import MetricReport
from groupsim.reporting import (
    CONFIG_FILE,
    DAILY_TOTALS_COLUMNS,
    DAILY_TOTALS_FILE,
    ENGAGEMENTS_FILE,
    METRICS_FILE,
    TRACE_FILE,
    emit_report,
    format_metrics_table,
    load_event,
    load_traces,
    read_json,
    write_event,
    write_metrics,
)
from groupsim.services.runtime import Scenario, SimulationRuntime


@pytest.fixture
def runtime(graph, gateway, cfg) -> SimulationRuntime:
    return SimulationRuntime(graph, gateway, cfg)


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


class TestLoadEvent:
    """Tests for load_event and read_json."""

    def test_bundled_event(self, event_02):
        assert event_02.id == "event_02"
        assert len(event_02.ground_truth.views) == 7

    def test_missing_file(self, tmp_path):
        with pytest.raises(PathValidationError, match="event file does not exist"):
            load_event(tmp_path / "absent.json")

    def test_directory_is_not_an_event(self, tmp_path):
        with pytest.raises(PathValidationError, match="event file must be a file"):
            load_event(tmp_path)

    def test_broken_json(self, tmp_path):
        path = tmp_path / "event.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(MalformedEvent) as exc_info:
            load_event(path)
        assert exc_info.value.field == "json"

    def test_short_series(self, tmp_path, event_02):
        data = event_02.to_dict()
        data["ground_truth"]["likes"] = [1, 2, 3]
        path = tmp_path / "event.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(MalformedEvent) as exc_info:
            load_event(path)
        assert exc_info.value.field == "likes"

    def test_written_fixture_reloads(self, tmp_path):
        event = make_fixture("double_peak", seed=2)
        assert load_event(write_event(event, tmp_path)) == event

    def test_read_json_invalid(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[1,", encoding="utf-8")
        with pytest.raises(ValidationError):
            read_json(path)


class TestEmitReport:
    """Tests for emit_report and the artefacts it writes."""

    def test_single_trace(self, runtime, event_02, cfg, tmp_path):
        trace = runtime.run(Scenario(event_02), seed=0)
        emitted = emit_report(trace, event_02, tmp_path / "out", cfg=cfg)
        out = tmp_path / "out"
        assert set(emitted.paths) == {"trace", "daily_totals", "engagements", "metrics", "config"}
        for name in (TRACE_FILE, DAILY_TOTALS_FILE, ENGAGEMENTS_FILE, METRICS_FILE, CONFIG_FILE):
            assert (out / name).is_file()

        totals = _read_csv(out / DAILY_TOTALS_FILE)
        assert len(totals) == 7
        assert tuple(totals[0]) == DAILY_TOTALS_COLUMNS
        assert [int(r["views"]) for r in totals] == trace.series("views")
        assert len(_read_csv(out / ENGAGEMENTS_FILE)) == 2 * 7

        config = json.loads((out / CONFIG_FILE).read_text())
        assert config["command"] == {"event": "event_02"}

    def test_replication_set(self, runtime, event_02, tmp_path):
        replication = runtime.replicate(Scenario(event_02), range(5))
        emitted = emit_report(replication, event_02, tmp_path)
        metrics = json.loads((tmp_path / METRICS_FILE).read_text())
        assert metrics["z_scores"] == list(replication.summary["views"].z_scores)
        assert max(abs(z) for z in metrics["z_scores"]) < 1
        assert emitted.report.traces == 5
        assert [t.seed for t in load_traces(tmp_path / TRACE_FILE)] == [0, 1, 2, 3, 4]

    def test_trace_list_becomes_replication(self, runtime, event_02, tmp_path):
        traces = [runtime.run(Scenario(event_02, horizon_days=7), seed) for seed in (3, 4)]
        emit_report(traces, event_02, tmp_path)
        data = json.loads((tmp_path / TRACE_FILE).read_text())
        assert data["seeds"] == [3, 4]
        assert set(data["summary"]) == {"views", "likes", "comments", "shares"}

    def test_empty_trace_list(self, event_02, tmp_path):
        with pytest.raises(ValidationError):
            emit_report([], event_02, tmp_path)

    def test_unwritable_outdir(self, runtime, event_02, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory", encoding="utf-8")
        trace = runtime.run(Scenario(event_02, horizon_days=7), seed=0)
        with pytest.raises(PathValidationError, match="ancestor is not a directory"):
            emit_report(trace, event_02, blocker / "out")

    def test_nested_outdir_created(self, runtime, event_02, tmp_path):
        trace = runtime.run(Scenario(event_02, horizon_days=7), seed=0)
        emitted = emit_report(trace, event_02, tmp_path / "runs" / "event_02")
        assert emitted.paths["metrics"].parent == (tmp_path / "runs" / "event_02").resolve()


class TestMetricsFile:
    def test_events_and_aggregate(self, tmp_path):
        reports = [MetricReport(name, 0.5, 10.0, (1.0,), 1.0, 0.0) for name in ("a", "b")]
        aggregate = MetricReport("aggregate", math.inf, 10.0, (1.0, 1.0), 1.0, 0.0)
        data = read_json(write_metrics(reports, tmp_path, aggregate=aggregate))
        assert [e["label"] for e in data["events"]] == ["a", "b"]
        assert data["aggregate"]["t_statistic"] is None
        assert data["aggregate"]["t_diverged"] is True


class TestFormatMetricsTable:
    def test_layout(self):
        reports = [
            MetricReport("event_02", 1.23456, 12.346, (0.5,), 0.5, 0.0, z_mean=-0.25),
            MetricReport("aggregate", math.inf, 8.0, (0.5, 0.7), 0.6, 0.1),
        ]
        lines = format_metrics_table(reports).splitlines()
        assert len(lines) == 4
        assert lines[0].split(" | ")[0].strip() == "Event"
        assert set(lines[1]) <= {"-", "+"}
        assert "1.235" in lines[2]
        assert "12.35%" in lines[2]
        assert "-0.250" in lines[2]
        assert lines[3].rstrip().endswith("n/a")
        assert "inf" in lines[3]
