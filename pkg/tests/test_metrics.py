"""Tests for groupsim.metrics."""

from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
import pytest

from groupsim.core.exceptions import (
    AllZeroActual,
    EmptyList,
    LengthMismatch,
    TooFewPairs,
    TooFewReplicates,
    ValidationError,
)
from groupsim.metrics import (
    MetricReport,
    ZScoreReport,
    as_series,
    dtw_dispersion,
    label_z,
    local_maxima,
    mape,
    paired_t,
    reproducibility_z,
    series_distance,
    t_diverged,
    znormalize,
)


def _brute_force_warp(a: np.ndarray, b: np.ndarray) -> float:
    """Recursive warping distance, memoised on (i, j)."""

    @lru_cache(maxsize=None)
    def best(i: int, j: int) -> float:
        cost = abs(a[i] - b[j])
        if i == 0 and j == 0:
            return cost
        candidates = []
        if i > 0:
            candidates.append(best(i - 1, j))
        if j > 0:
            candidates.append(best(i, j - 1))
        if i > 0 and j > 0:
            candidates.append(best(i - 1, j - 1))
        return cost + min(candidates)

    return best(len(a) - 1, len(b) - 1)


class TestSeries:
    def test_as_series_rejects_empty(self):
        with pytest.raises(ValidationError):
            as_series([])

    def test_as_series_rejects_nan(self):
        with pytest.raises(ValidationError):
            as_series([1.0, float("nan")])

    def test_local_maxima(self):
        assert local_maxima([1, 3, 2, 2, 5, 1, 0]) == [1, 4]
        assert local_maxima([5, 4, 3]) == []

    def test_znormalize_constant_is_zero(self):
        np.testing.assert_allclose(znormalize([4, 4, 4]), [0, 0, 0])

    def test_znormalize_uses_population_std(self):
        z = znormalize([1, 2, 3])
        assert z[2] == pytest.approx(math.sqrt(1.5), rel=1e-6)


class TestSeriesDistance:
    """Tests for series_distance in both modes."""

    def test_aligned_reversed(self):
        assert series_distance([1, 2, 3], [3, 2, 1]) == pytest.approx(4.898979, abs=1e-6)

    def test_identical_is_zero(self):
        assert series_distance([5, 9, 2, 7], [5, 9, 2, 7], mode="warped") == pytest.approx(0.0)

    def test_scale_invariant(self):
        a = [120, 410, 180, 95]
        assert series_distance(a, [x * 10 for x in a]) == pytest.approx(0.0, abs=1e-6)

    def test_squared_metric(self):
        expected = 2 * (2 * math.sqrt(1.5)) ** 2
        result = series_distance([1, 2, 3], [3, 2, 1], metric="squared")
        assert result == pytest.approx(expected, rel=1e-6)

    def test_aligned_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            series_distance([1, 2, 3], [1, 2])

    def test_warped_allows_unequal_lengths(self):
        assert series_distance([1, 2, 3, 2], [1, 3, 2], mode="warped") >= 0.0

    @pytest.mark.parametrize("kwargs", [{"metric": "cosine"}, {"mode": "stretched"}])
    def test_unknown_options(self, kwargs):
        with pytest.raises(ValidationError):
            series_distance([1, 2, 3], [3, 2, 1], **kwargs)

    def test_warped_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n, m = rng.integers(2, 9, size=2)
            a = rng.normal(size=n) * 100
            b = rng.normal(size=m) * 100
            expected = _brute_force_warp(znormalize(a), znormalize(b))
            assert series_distance(a, b, mode="warped") == pytest.approx(expected, abs=1e-9)

    def test_warped_never_exceeds_aligned(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a, b = rng.random(7), rng.random(7)
            assert series_distance(a, b, mode="warped") <= series_distance(a, b) + 1e-9


class TestDispersion:
    def test_mean_and_population_std(self):
        mean, std = dtw_dispersion([1.0, 3.0])
        assert mean == 2.0
        assert std == 1.0

    def test_empty(self):
        with pytest.raises(EmptyList):
            dtw_dispersion([])


class TestMape:
    """Tests for mape."""

    def test_basic(self):
        assert mape([110, 90], [100, 100]) == pytest.approx(10.0)

    def test_zero_actuals_skipped(self, caplog):
        with caplog.at_level(logging.WARNING):
            assert mape([5, 110], [0, 100]) == pytest.approx(10.0)
        assert any("skipped 1" in r.getMessage() for r in caplog.records)

    def test_all_zero(self):
        with pytest.raises(AllZeroActual):
            mape([1, 2], [0, 0])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            mape([1, 2, 3], [1, 2])


class TestPairedT:
    """Tests for paired_t."""

    def test_known_value(self):
        # differences 1, 2, 3: mean 2, sample sd 1
        assert paired_t([2, 4, 6], [1, 2, 3]) == pytest.approx(2 / (1 / math.sqrt(3)))

    def test_identical_is_zero(self):
        assert paired_t([3, 4, 5], [3, 4, 5]) == 0.0

    def test_constant_offset_diverges(self):
        t = paired_t([5, 6, 7], [3, 4, 5])
        assert t == math.inf
        assert t_diverged(t)
        assert paired_t([1, 2], [3, 4]) == -math.inf

    def test_too_few_pairs(self):
        with pytest.raises(TooFewPairs):
            paired_t([1], [2])


class TestReproducibility:
    """Tests for reproducibility_z and label_z."""

    def test_scores_against_reference(self):
        report = reproducibility_z([10, 12, 14], reference=12)
        assert report.std == pytest.approx(2.0)
        assert report.z_scores == pytest.approx((-1.0, 0.0, 1.0))
        assert report.z_mean == pytest.approx(0.0)
        assert report.max_abs == pytest.approx(1.0)
        assert report.tolerance is None
        assert report.label == "acceptable"

    def test_tolerance_scale(self):
        report = reproducibility_z([95, 105, 100, 102], reference=100, tolerance=0.1)
        assert report.std == pytest.approx(10.0)
        assert report.z_scores == pytest.approx((-0.5, 0.5, 0.0, 0.2))
        assert report.z_mean == pytest.approx(0.05)
        assert report.tolerance == 0.1
        assert report.label == "excellent"

    def test_tolerance_outside_bound(self):
        report = reproducibility_z([80, 100], reference=100, tolerance=0.1)
        assert report.max_abs == pytest.approx(2.0)
        assert report.label == "acceptable"

    def test_zero_reference_falls_back_to_sample_std(self):
        report = reproducibility_z([1, 3], reference=0, tolerance=0.1)
        assert report.tolerance is None
        assert report.std == pytest.approx(math.sqrt(2))

    def test_sample_scale_never_certifies_five_replicates(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            x = rng.normal(100.0, 2.0, size=5)
            reference = float(rng.normal(100.0, 2.0))
            assert reproducibility_z(x, reference).max_abs >= math.sqrt(4 / 5) - 1e-12

    def test_zero_variance(self):
        report = reproducibility_z([7, 7, 7], reference=7)
        assert report.zero_variance
        assert report.z_scores == (0.0, 0.0, 0.0)

    def test_median_reference_bounds_mean(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            x = rng.lognormal(size=5)
            assert abs(reproducibility_z(x, float(np.median(x))).z_mean) < 1.0

    def test_too_few(self):
        with pytest.raises(TooFewReplicates):
            reproducibility_z([1.0], reference=1.0)

    @pytest.mark.parametrize(
        "z,label",
        [
            (0.0, "excellent"),
            (-0.99, "excellent"),
            (1.0, "acceptable"),
            (2.9, "acceptable"),
            (-3.0, "poor"),
            (12.0, "poor"),
        ],
    )
    def test_label_z(self, z, label):
        assert label_z(z) == label


class TestMetricReport:
    def test_diverged_t_serialises_as_null(self):
        report = MetricReport(
            label="event_02",
            t_statistic=math.inf,
            mape_percent=12.5,
            dtw_distances=(1.0, 2.0),
            dtw_mean=1.5,
            dtw_std=0.5,
            t_per_action={"views": math.inf, "likes": 0.4},
            t_total=-math.inf,
        )
        data = report.to_dict()
        assert data["t_statistic"] is None
        assert data["t_diverged"] is True
        assert data["t_per_action"] == {"views": None, "likes": 0.4}
        assert data["t_per_action_diverged"] == ["views"]
        assert data["t_total_diverged"] is True
        assert data["z_label"] is None

    def test_z_label(self):
        report = MetricReport("x", 0.1, 1.0, (0.0,), 0.0, 0.0, z_mean=-1.5)
        assert report.z_label == "acceptable"

    def test_zscore_report_dict(self):
        data = ZScoreReport((0.5, -0.5), 0.0, 10.0, 2.0).to_dict()
        assert data["max_abs_z"] == 0.5
        assert data["label"] == "excellent"
