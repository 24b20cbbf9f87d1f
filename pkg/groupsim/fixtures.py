"""Synthetic benchmark events.

Each archetype has a fixed 7-day views profile. Per-day noise is bounded
to +/-5%, and neighbouring profile values differ by more than the noise
band, so the peak structure survives every seed. Likes, comments and
shares are drawn as ratios that respect the engagement laws.
"""

from __future__ import annotations

from datetime import date, timedelta
from enum import Enum
from typing import Optional, Union

import numpy as np

from .core.exceptions import ValidationError
from .core.models import (
    SERIES_LENGTH,
    Domain,
    EventRecord,
    GroundTruth,
    Platform,
    validate_event,
)
from .core.seeding import derive_seed

NOISE = 0.05
PEAK_VIEWS_PER_SCALE = 1000
FIXTURE_START = date(2024, 3, 1)

LIKE_RATIO = (0.03, 0.08)
COMMENT_RATIO = (0.2, 0.6)
SHARE_RATIO = (0.1, 0.5)


class Archetype(str, Enum):
    SINGLE_PEAK_DAY2 = "single_peak_day2"
    SINGLE_PEAK_DAY3 = "single_peak_day3"
    DOUBLE_PEAK = "double_peak"


VIEW_PROFILES: dict[Archetype, tuple[float, ...]] = {
    Archetype.SINGLE_PEAK_DAY2: (0.45, 1.0, 0.6, 0.35, 0.2, 0.12, 0.07),
    Archetype.SINGLE_PEAK_DAY3: (0.25, 0.6, 1.0, 0.55, 0.3, 0.16, 0.08),
    Archetype.DOUBLE_PEAK: (0.3, 1.0, 0.45, 0.3, 0.7, 0.35, 0.15),
}

_TITLES: dict[Archetype, tuple[str, str]] = {
    Archetype.SINGLE_PEAK_DAY2: (
        "Exam policy announcement",
        "The education ministry announced a change to the national exam schedule.",
    ),
    Archetype.SINGLE_PEAK_DAY3: (
        "Campus safety incident",
        "Reports of a campus safety incident spread after a student post went viral.",
    ),
    Archetype.DOUBLE_PEAK: (
        "Tuition fee dispute",
        "A tuition increase drew protest, followed days later by an official response.",
    ),
}


def make_fixture(
    archetype: Union[Archetype, str],
    scale: int = 10,
    seed: int = 0,
    *,
    event_id: Optional[str] = None,
) -> EventRecord:
    """Build one synthetic education event for ``archetype``.

    Args:
        archetype: Peak structure of the views series.
        scale: Peak views in thousands.
        seed: Noise seed.
        event_id: Override for the generated id.

    Raises:
        ValidationError: If ``scale`` is not positive or the archetype is unknown.
    """
    try:
        kind = Archetype(archetype)
    except ValueError:
        raise ValidationError(
            f"Unknown archetype: {archetype}",
            details={"allowed": ", ".join(a.value for a in Archetype)},
            operation="make_fixture",
        )
    if isinstance(scale, bool) or not isinstance(scale, int) or scale <= 0:
        raise ValidationError(
            f"Scale must be a positive integer, got {scale!r}", operation="make_fixture"
        )

    rng = np.random.default_rng(derive_seed(seed, "fixture", kind.value))
    profile = np.array(VIEW_PROFILES[kind], dtype=float)
    noise = rng.uniform(1.0 - NOISE, 1.0 + NOISE, size=SERIES_LENGTH)
    views = np.rint(profile * noise * scale * PEAK_VIEWS_PER_SCALE).astype(int)

    likes = np.floor(views * rng.uniform(*LIKE_RATIO, size=SERIES_LENGTH)).astype(int)
    comments = np.floor(likes * rng.uniform(*COMMENT_RATIO, size=SERIES_LENGTH)).astype(int)
    shares = np.floor(likes * rng.uniform(*SHARE_RATIO, size=SERIES_LENGTH)).astype(int)

    title, content = _TITLES[kind]
    record = EventRecord(
        id=event_id or f"{kind.value}-{seed:03d}",
        title=title,
        content=content,
        domain=Domain.EDUCATION,
        country="CN",
        platform=Platform.WEIBO,
        start_date=FIXTURE_START + timedelta(days=int(seed) % 28),
        ground_truth=GroundTruth(
            views=tuple(int(v) for v in views),
            likes=tuple(int(v) for v in likes),
            comments=tuple(int(v) for v in comments),
            shares=tuple(int(v) for v in shares),
        ),
    )
    return validate_event(record)


def benchmark_suite(
    per_archetype: int = 10, scale: int = 10
) -> list[tuple[Archetype, EventRecord]]:
    """``per_archetype`` events of every archetype, seeds 0..n-1."""
    return [
        (kind, make_fixture(kind, scale, seed))
        for kind in Archetype
        for seed in range(per_archetype)
    ]
