"""Trace evaluation against observed ground truth."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.exceptions import ValidationError
from ..core.logging import get_logger, get_run_ledger
from ..core.models import ACTION_FIELDS, EventRecord
from ..metrics import (
    DistanceMetric,
    DistanceMode,
    MetricReport,
    ZScoreReport,
    dtw_dispersion,
    mape,
    paired_t,
    reproducibility_z,
    series_distance,
)
from .runtime import SimulationTrace

log = get_logger(__name__)


@dataclass(frozen=True)
class EventPair:
    """Mean simulated series and observed series for one event and action."""

    event_id: str
    predicted: tuple[float, ...]
    actual: tuple[float, ...]


def mean_series(traces: Sequence[SimulationTrace], action: str = "views") -> np.ndarray:
    """Day-wise mean of ``action`` across traces."""
    return np.mean(np.array([t.series(action) for t in traces], dtype=float), axis=0)


def _usable(traces: Sequence[SimulationTrace], logger: logging.Logger) -> list[SimulationTrace]:
    complete = [t for t in traces if t.complete]
    skipped = len(traces) - len(complete)
    if skipped:
        logger.warning("Ignoring %d incomplete trace(s)", skipped)
    if not complete:
        raise ValidationError("No complete trace to evaluate", operation="evaluate")
    return complete


def evaluate_traces(
    traces: Sequence[SimulationTrace],
    event: EventRecord,
    *,
    metric: DistanceMetric = "abs",
    mode: DistanceMode = "aligned",
    reproducibility: Optional[ZScoreReport] = None,
    logger: Optional[logging.Logger] = None,
) -> MetricReport:
    """Score one event's traces against its ground truth.

    The headline numbers use views: one distance per trace, MAPE averaged
    over traces, t on the mean simulated series. Per-action t statistics
    and replicate Z-scores (when there are two or more traces) ride along;
    ``reproducibility`` supplies the views Z-scores a replication already
    computed instead of scoring the totals against their median.

    Raises:
        ValidationError: If no trace is complete.
        LengthMismatch: If the horizon differs from the ground-truth length.
    """
    logger = logger or log
    usable = _usable(traces, logger)
    actual = np.array(event.ground_truth.views, dtype=float)

    distances = [series_distance(t.series("views"), actual, metric, mode) for t in usable]
    dtw_mean, dtw_std = dtw_dispersion(distances)
    mape_percent = float(np.mean([mape(t.series("views"), actual, logger=logger) for t in usable]))
    t_statistic = paired_t(mean_series(usable, "views"), actual)
    t_per_action = {
        name: paired_t(mean_series(usable, name), event.ground_truth.series(name))
        for name in ACTION_FIELDS
    }

    z_scores: tuple[float, ...] = ()
    z_mean: Optional[float] = None
    if reproducibility is not None:
        z_scores, z_mean = reproducibility.z_scores, reproducibility.z_mean
    elif len(usable) >= 2:
        totals = [float(t.totals()["views"]) for t in usable]
        report = reproducibility_z(totals, float(np.median(totals)))
        z_scores, z_mean = report.z_scores, report.z_mean

    result = MetricReport(
        label=event.id,
        t_statistic=t_statistic,
        mape_percent=mape_percent,
        dtw_distances=tuple(distances),
        dtw_mean=dtw_mean,
        dtw_std=dtw_std,
        z_scores=z_scores,
        z_mean=z_mean,
        t_per_action=t_per_action,
        traces=len(usable),
    )
    get_run_ledger().record(
        "evaluate",
        scenario=event.id,
        details={"traces": len(usable), "mape": round(mape_percent, 4), "dtw_mean": dtw_mean},
    )
    return result


def event_pair(
    traces: Sequence[SimulationTrace], event: EventRecord, action: str = "views"
) -> EventPair:
    usable = [t for t in traces if t.complete]
    return EventPair(
        event_id=event.id,
        predicted=tuple(float(v) for v in mean_series(usable, action)),
        actual=tuple(float(v) for v in event.ground_truth.series(action)),
    )


def aggregate_reports(
    reports: Sequence[MetricReport],
    pairs: Sequence[EventPair],
    *,
    label: str = "aggregate",
) -> MetricReport:
    """Combine per-event reports.

    ``t_statistic`` pairs every simulated day with its observed day across
    all events; ``t_total`` pairs per-event totals. DTW mean and std are
    taken over the per-event DTW means; Z-scores are the per-event
    replicate-mean Z-scores.

    Raises:
        ValidationError: If there are no reports.
    """
    if not reports:
        raise ValidationError("No reports to aggregate", operation="aggregate_reports")

    per_day_pred = np.concatenate([np.asarray(p.predicted, dtype=float) for p in pairs])
    per_day_actual = np.concatenate([np.asarray(p.actual, dtype=float) for p in pairs])
    t_per_day = paired_t(per_day_pred, per_day_actual)
    t_total: Optional[float] = None
    if len(pairs) >= 2:
        t_total = paired_t([sum(p.predicted) for p in pairs], [sum(p.actual) for p in pairs])

    event_dtw = [r.dtw_mean for r in reports]
    dtw_mean, dtw_std = dtw_dispersion(event_dtw)
    z_scores = tuple(r.z_mean for r in reports if r.z_mean is not None)

    return MetricReport(
        label=label,
        t_statistic=t_per_day,
        mape_percent=float(np.mean([r.mape_percent for r in reports])),
        dtw_distances=tuple(event_dtw),
        dtw_mean=dtw_mean,
        dtw_std=dtw_std,
        z_scores=z_scores,
        z_mean=float(np.mean(z_scores)) if z_scores else None,
        t_total=t_total,
        traces=sum(r.traces for r in reports),
    )
