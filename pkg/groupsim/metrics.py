"""Evaluation metrics for simulated vs. observed engagement series.

All functions take plain sequences or numpy arrays and return floats or
small frozen reports. Standard deviations follow the formula each metric
is defined with: population for z-normalisation and DTW dispersion,
sample (n - 1) for the paired t statistic and the reproducibility Z-score
unless a tolerance scale replaces it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np

from .core.exceptions import (
    AllZeroActual,
    EmptyList,
    LengthMismatch,
    TooFewPairs,
    TooFewReplicates,
    ValidationError,
)
from .core.logging import get_logger

EPSILON = 1e-8
EXCELLENT_Z = 1.0
ACCEPTABLE_Z = 3.0

SeriesLike = Union[Sequence[float], np.ndarray]
DistanceMetric = Literal["abs", "squared"]
DistanceMode = Literal["aligned", "warped"]

log = get_logger(__name__)


def as_series(values: SeriesLike, name: str = "series") -> np.ndarray:
    """Validate and convert to a 1-D float array of finite values."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D series", operation="metrics")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values", operation="metrics")
    return arr


def _paired(pred: SeriesLike, actual: SeriesLike) -> tuple[np.ndarray, np.ndarray]:
    p = as_series(pred, "pred")
    a = as_series(actual, "actual")
    if p.size != a.size:
        raise LengthMismatch(p.size, a.size)
    return p, a


def local_maxima(values: SeriesLike) -> list[int]:
    """0-based indices of interior points strictly above both neighbours."""
    arr = as_series(values)
    return [i for i in range(1, arr.size - 1) if arr[i] > arr[i - 1] and arr[i] > arr[i + 1]]


# =============================================================================
# Normalisation and distances
# =============================================================================


def znormalize(x: SeriesLike) -> np.ndarray:
    """(x - mean) / (population std + 1e-8)."""
    arr = as_series(x)
    return (arr - arr.mean()) / (arr.std() + EPSILON)


def _pointwise(diff: np.ndarray, metric: DistanceMetric) -> np.ndarray:
    if metric == "abs":
        return np.abs(diff)
    if metric == "squared":
        return diff**2
    raise ValidationError(f"Unknown distance metric: {metric}", operation="series_distance")


def _warped(a: np.ndarray, b: np.ndarray, metric: DistanceMetric) -> float:
    cost = _pointwise(a[:, None] - b[None, :], metric)
    n, m = cost.shape
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            acc[i, j] = cost[i - 1, j - 1] + min(acc[i - 1, j], acc[i, j - 1], acc[i - 1, j - 1])
    return float(acc[n, m])


def series_distance(
    a: SeriesLike,
    b: SeriesLike,
    metric: DistanceMetric = "abs",
    mode: DistanceMode = "aligned",
) -> float:
    """Distance between the z-normalised forms of ``a`` and ``b``.

    ``aligned`` sums day-by-day differences and needs equal lengths;
    ``warped`` is the classic dynamic-programming warping distance.

    Raises:
        LengthMismatch: Aligned mode with unequal lengths.
    """
    za, zb = znormalize(a), znormalize(b)
    if mode == "aligned":
        if za.size != zb.size:
            raise LengthMismatch(za.size, zb.size)
        return float(_pointwise(za - zb, metric).sum())
    if mode == "warped":
        return _warped(za, zb, metric)
    raise ValidationError(f"Unknown distance mode: {mode}", operation="series_distance")


def dtw_dispersion(distances: Sequence[float]) -> tuple[float, float]:
    """Mean and population std of a list of distances.

    Raises:
        EmptyList: If ``distances`` is empty.
    """
    if len(distances) == 0:
        raise EmptyList("distances")
    arr = as_series(distances, "distances")
    return float(arr.mean()), float(arr.std())


# =============================================================================
# Error and significance
# =============================================================================


def mape(
    pred: SeriesLike, actual: SeriesLike, *, logger: Optional[logging.Logger] = None
) -> float:
    """Mean absolute percentage error over days with a non-zero actual.

    Raises:
        LengthMismatch: Unequal lengths.
        AllZeroActual: Every actual value is zero.
    """
    p, a = _paired(pred, actual)
    valid = a != 0
    if not valid.any():
        raise AllZeroActual(a.size)
    skipped = int(a.size - valid.sum())
    if skipped:
        (logger or log).warning("MAPE skipped %d zero-actual points of %d", skipped, a.size)
    return float(100.0 * np.mean(np.abs(p[valid] - a[valid]) / np.abs(a[valid])))


def paired_t(pred: SeriesLike, actual: SeriesLike) -> float:
    """Paired t statistic of pred - actual.

    Zero when every difference is zero; +/-inf when the differences are a
    non-zero constant (see :func:`t_diverged`).

    Raises:
        LengthMismatch: Unequal lengths.
        TooFewPairs: Fewer than two pairs.
    """
    p, a = _paired(pred, actual)
    if p.size < 2:
        raise TooFewPairs(int(p.size))
    d = p - a
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        return 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
    return mean / (sd / math.sqrt(d.size))


def t_diverged(t: float) -> bool:
    return math.isinf(t)


def label_z(z: float) -> str:
    """excellent below 1, acceptable below 3, otherwise poor."""
    magnitude = abs(z)
    if magnitude < EXCELLENT_Z:
        return "excellent"
    if magnitude < ACCEPTABLE_Z:
        return "acceptable"
    return "poor"


@dataclass(frozen=True)
class ZScoreReport:
    """Per-replicate and replicate-mean Z-scores against a reference.

    ``std`` is the denominator: the replicates' sample std, or the fixed
    tolerance scale when ``tolerance`` is set.
    """

    z_scores: tuple[float, ...]
    z_mean: float
    reference: float
    std: float
    zero_variance: bool = False
    tolerance: Optional[float] = None

    @property
    def max_abs(self) -> float:
        return max(abs(z) for z in self.z_scores)

    @property
    def label(self) -> str:
        return label_z(self.max_abs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "z_scores": list(self.z_scores),
            "z_mean": self.z_mean,
            "reference": self.reference,
            "std": self.std,
            "tolerance": self.tolerance,
            "zero_variance": self.zero_variance,
            "max_abs_z": self.max_abs,
            "label": self.label,
        }


def reproducibility_z(
    replicate_totals: Sequence[float],
    reference: float,
    *,
    tolerance: Optional[float] = None,
) -> ZScoreReport:
    """z_i = (x_i - reference) / scale.

    Without ``tolerance`` the scale is the sample std of the replicates.
    With it the scale is ``tolerance * |reference|``; a zero scale falls
    back to the sample std.

    Raises:
        TooFewReplicates: Fewer than two replicates.
    """
    if len(replicate_totals) < 2:
        raise TooFewReplicates(len(replicate_totals))
    x = as_series(replicate_totals, "replicate_totals")
    ref = float(reference)
    scale = abs(tolerance * ref) if tolerance else 0.0
    if scale == 0.0:
        tolerance = None
        scale = float(x.std(ddof=1))
    if scale == 0.0:
        zeros = tuple(0.0 for _ in range(x.size))
        return ZScoreReport(zeros, 0.0, ref, 0.0, zero_variance=True)
    z = tuple(float(v) for v in (x - ref) / scale)
    return ZScoreReport(z, float((x.mean() - ref) / scale), ref, scale, tolerance=tolerance)


# =============================================================================
# Report
# =============================================================================


def _t_json(t: Optional[float]) -> Optional[float]:
    if t is None or math.isinf(t):
        return None
    return t


@dataclass(frozen=True)
class MetricReport:
    """Metrics for one event, or an aggregate across events."""

    label: str
    t_statistic: float
    mape_percent: float
    dtw_distances: tuple[float, ...]
    dtw_mean: float
    dtw_std: float
    z_scores: tuple[float, ...] = ()
    z_mean: Optional[float] = None
    t_per_action: dict[str, float] = field(default_factory=dict)
    t_total: Optional[float] = None
    traces: int = 1

    @property
    def t_diverged(self) -> bool:
        return t_diverged(self.t_statistic)

    @property
    def z_label(self) -> Optional[str]:
        return label_z(self.z_mean) if self.z_mean is not None else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "t_statistic": _t_json(self.t_statistic),
            "t_diverged": self.t_diverged,
            "mape_percent": self.mape_percent,
            "dtw_distances": list(self.dtw_distances),
            "dtw_mean": self.dtw_mean,
            "dtw_std": self.dtw_std,
            "z_scores": list(self.z_scores),
            "z_mean": self.z_mean,
            "z_label": self.z_label,
            "t_per_action": {k: _t_json(v) for k, v in self.t_per_action.items()},
            "t_per_action_diverged": sorted(
                k for k, v in self.t_per_action.items() if t_diverged(v)
            ),
            "t_total": _t_json(self.t_total),
            "t_total_diverged": self.t_total is not None and t_diverged(self.t_total),
            "traces": self.traces,
        }
