"""Shared domain types.

All types are frozen value objects so agents, states and event snapshots can
be handed to worker threads without copying.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from .exceptions import (
    EmptyPopulation,
    InvalidConfigurationError,
    InvalidEmotionError,
    MalformedEvent,
)

SERIES_LENGTH = 7
ACTION_FIELDS = ("views", "likes", "comments", "shares")


class Domain(str, Enum):
    EDUCATION = "education"
    POLITICS = "politics"
    BUSINESS = "business"
    TECHNOLOGY = "technology"
    CULTURE = "culture"
    SPORTS = "sports"
    HEALTH = "health"
    ENTERTAINMENT = "entertainment"
    ENVIRONMENT = "environment"
    ECONOMY = "economy"


class Platform(str, Enum):
    TWITTER = "twitter"
    REDDIT = "reddit"
    WEIBO = "weibo"


class Characteristic(str, Enum):
    """Volatility class of a group."""

    SUSCEPTIBLE = "susceptible"
    ORDINARY = "ordinary"
    CALM = "calm"


class ActionKind(str, Enum):
    VIEW = "view"
    LIKE = "like"
    COMMENT = "comment"
    SHARE = "share"
    PREDICT = "predict"


ENGAGEMENT_ACTIONS = frozenset(
    {ActionKind.VIEW, ActionKind.LIKE, ActionKind.COMMENT, ActionKind.SHARE}
)


class MemoryKind(str, Enum):
    PERCEPTION = "perception"
    DECISION = "decision"
    ACTION = "action"


class Sentiment(str, Enum):
    """Direction an event pushes emotions in."""

    NEGATIVE = "negative"
    POSITIVE = "positive"
    MIXED = "mixed"


# =============================================================================
# Events
# =============================================================================


@dataclass(frozen=True)
class GroundTruth:
    """Seven daily counts per action."""

    views: tuple[int, ...]
    likes: tuple[int, ...]
    comments: tuple[int, ...]
    shares: tuple[int, ...]

    def series(self, action: str) -> tuple[int, ...]:
        return tuple(getattr(self, action))

    def totals(self) -> dict[str, int]:
        return {name: int(sum(self.series(name))) for name in ACTION_FIELDS}

    def to_dict(self) -> dict[str, list[int]]:
        return {name: list(self.series(name)) for name in ACTION_FIELDS}


@dataclass(frozen=True)
class EventRecord:
    """One benchmark event: metadata plus a 7-day engagement series."""

    id: str
    title: str
    content: str
    domain: Domain
    country: str
    platform: Platform
    start_date: date
    ground_truth: GroundTruth

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "content": self.content,
            "domain": self.domain.value,
            "country": self.country,
            "platform": self.platform.value,
            "start_date": self.start_date.isoformat(),
            "ground_truth": self.ground_truth.to_dict(),
        }

    @property
    def summary(self) -> str:
        return f"{self.title}: {self.content}"


def _require(data: Mapping[str, Any], key: str) -> Any:
    value = data.get(key)
    if value is None or (isinstance(value, str) and not value.strip()):
        raise MalformedEvent(key, "missing")
    return value


def _parse_series(name: str, raw: Any) -> tuple[int, ...]:
    if not isinstance(raw, (list, tuple)):
        raise MalformedEvent(name, "not a list")
    values: list[int] = []
    for item in raw:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise MalformedEvent(name, "non-numeric entry")
        if isinstance(item, float) and not item.is_integer():
            raise MalformedEvent(name, "non-integer entry")
        values.append(int(item))
    return tuple(values)


def event_from_dict(data: Mapping[str, Any]) -> EventRecord:
    """Build a validated EventRecord from its JSON object form.

    Raises:
        MalformedEvent: naming the first missing or invalid field.
    """
    if not isinstance(data, Mapping):
        raise MalformedEvent("json", "top level is not an object")

    event_id = str(_require(data, "id"))
    title = str(_require(data, "title"))
    content = str(_require(data, "content"))

    try:
        domain = Domain(str(_require(data, "domain")).strip().lower())
    except ValueError:
        raise MalformedEvent("domain", f"unknown domain {data.get('domain')!r}")

    country = str(_require(data, "country")).strip().upper()

    try:
        platform = Platform(str(_require(data, "platform")).strip().lower())
    except ValueError:
        raise MalformedEvent("platform", f"unknown platform {data.get('platform')!r}")

    try:
        start = date.fromisoformat(str(_require(data, "start_date")))
    except ValueError:
        raise MalformedEvent("start_date", "not an ISO-8601 date")

    gt_raw = _require(data, "ground_truth")
    if not isinstance(gt_raw, Mapping):
        raise MalformedEvent("ground_truth", "not an object")
    series = {name: _parse_series(name, _require(gt_raw, name)) for name in ACTION_FIELDS}

    record = EventRecord(
        id=event_id,
        title=title,
        content=content,
        domain=domain,
        country=country,
        platform=platform,
        start_date=start,
        ground_truth=GroundTruth(**series),
    )
    return validate_event(record)


def event_from_json(text: str) -> EventRecord:
    """Parse an event document; broken JSON is reported as field "json"."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedEvent("json", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return event_from_dict(data)


def validate_event(record: EventRecord) -> EventRecord:
    """Return ``record`` unchanged if every event invariant holds."""
    for key in ("id", "title", "content", "country"):
        if not str(getattr(record, key) or "").strip():
            raise MalformedEvent(key, "missing")
    if not isinstance(record.domain, Domain):
        raise MalformedEvent("domain", "missing")

    for name in ACTION_FIELDS:
        values = record.ground_truth.series(name)
        if len(values) != SERIES_LENGTH:
            raise MalformedEvent(name, f"length {len(values)} != {SERIES_LENGTH}")
        if any(v < 0 for v in values):
            raise MalformedEvent(name, "negative")
    return record


# =============================================================================
# Emotions
# =============================================================================

EMOTION_CHANNELS = ("happiness", "sadness", "anger")
ATTITUDE_CHANNELS = ("optimism", "pessimism")
CHANNELS = EMOTION_CHANNELS + ATTITUDE_CHANNELS


@dataclass(frozen=True)
class EmotionState:
    """Three emotion channels and two attitude channels, each in [0, 1]."""

    happiness: float = 0.0
    sadness: float = 0.0
    anger: float = 0.0
    optimism: float = 0.0
    pessimism: float = 0.0

    def __post_init__(self) -> None:
        for name in CHANNELS:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidEmotionError(name, value)
            if value < 0.0 or value > 1.0:
                raise InvalidEmotionError(name, value)

    @classmethod
    def zero(cls) -> "EmotionState":
        return cls()

    @classmethod
    def from_vector(cls, values: Iterable[float]) -> "EmotionState":
        """Build a state from five values, clipping each into [0, 1]."""
        vec = np.clip(np.nan_to_num(np.asarray(list(values), dtype=float)), 0.0, 1.0)
        if vec.shape != (len(CHANNELS),):
            raise InvalidEmotionError("vector", f"shape {vec.shape}")
        return cls(*(float(v) for v in vec))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EmotionState":
        return cls(**{name: float(data.get(name, 0.0)) for name in CHANNELS})

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in CHANNELS], dtype=float)

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in CHANNELS}

    @property
    def intensity(self) -> float:
        """Strongest emotion channel."""
        return max(self.happiness, self.sadness, self.anger)

    @property
    def lean(self) -> float:
        """Optimism minus pessimism, in [-1, 1]."""
        return self.optimism - self.pessimism

    def emotions_text(self) -> str:
        inner = ", ".join(f"'{n}': {getattr(self, n):.4f}" for n in EMOTION_CHANNELS)
        return "{ " + inner + " }"

    def attitudes_text(self) -> str:
        inner = ", ".join(f"'{n}': {getattr(self, n):.4f}" for n in ATTITUDE_CHANNELS)
        return "{ " + inner + " }"


# =============================================================================
# Groups and agents
# =============================================================================


@dataclass(frozen=True)
class GroupSpec:
    """One node of a group tree."""

    name: str
    population: int
    characteristic: Optional[Characteristic]
    layer: int
    parent: Optional[str] = None


@dataclass(frozen=True)
class MemoryItem:
    kind: MemoryKind
    day: int
    payload: str
    salience: float
    emotions: Optional[EmotionState] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "day": self.day,
            "payload": self.payload,
            "salience": self.salience,
            "emotions": self.emotions.to_dict() if self.emotions else None,
        }


@dataclass(frozen=True)
class Memory:
    """Bounded FIFO of memory items, oldest first."""

    items: tuple[MemoryItem, ...] = ()
    capacity: int = 16

    def __len__(self) -> int:
        return len(self.items)

    def to_text(self, limit: int = 6) -> str:
        if not self.items:
            return "none"
        recent = self.items[-limit:]
        return "; ".join(f"day {m.day} {m.kind.value}: {m.payload}" for m in recent)

    def to_dict(self) -> dict[str, Any]:
        return {"capacity": self.capacity, "items": [m.to_dict() for m in self.items]}


@dataclass(frozen=True)
class Prediction:
    option: str
    confidence: float

    def to_dict(self) -> dict[str, Any]:
        return {"option": self.option, "confidence": self.confidence}


@dataclass(frozen=True)
class AgentState:
    emotions: EmotionState = field(default_factory=EmotionState)
    day: int = 0
    last_action: Optional[ActionKind] = None
    prediction: Optional[Prediction] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "emotions": self.emotions.to_dict(),
            "day": self.day,
            "last_action": self.last_action.value if self.last_action else None,
            "prediction": self.prediction.to_dict() if self.prediction else None,
        }


@dataclass(frozen=True)
class GroupAgent:
    id: str
    name: str
    country: str
    population: int
    characteristic: Characteristic
    description: str
    state: AgentState = field(default_factory=AgentState)
    memory: Memory = field(default_factory=Memory)

    def evolve(self, state: AgentState, memory: Memory) -> "GroupAgent":
        return replace(self, state=state, memory=memory)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "country": self.country,
            "population": self.population,
            "characteristic": self.characteristic.value,
            "description": self.description,
        }


def agent_id_for(group_name: str) -> str:
    return f"{group_name}-agents"


def compute_population_weights(agents: Sequence[GroupAgent]) -> dict[str, float]:
    """Map agent id to its share of the total population.

    Raises:
        EmptyPopulation: If there are no agents or every population is zero.
    """
    total = sum(a.population for a in agents)
    if not agents or total <= 0:
        raise EmptyPopulation(len(agents))
    return {a.id: a.population / total for a in agents}


# =============================================================================
# Perception, decisions and engagement
# =============================================================================


@dataclass(frozen=True)
class Perception:
    """What every agent sees at the start of a day."""

    day: int
    event_summary: str
    domain: Domain
    country: str
    event_counters: tuple[int, int, int, int]
    heat: float
    sentiment: Sentiment = Sentiment.NEGATIVE

    def counters_text(self) -> str:
        views, likes, comments, shares = self.event_counters
        return f"views={views}, likes={likes}, comments={comments}, shares={shares}"


@dataclass(frozen=True)
class ActionDecision:
    action: ActionKind
    reason: str = ""
    plan: tuple[str, ...] = ()
    prediction: Optional[str] = None
    confidence: Optional[float] = None


@dataclass(frozen=True)
class DailyEngagement:
    date: date
    views: int = 0
    likes: int = 0
    comments: int = 0
    shares: int = 0
    agent_id: str = ""

    def counts(self) -> tuple[int, int, int, int]:
        return (self.views, self.likes, self.comments, self.shares)

    def to_dict(self) -> dict[str, Any]:
        return {
            "date": self.date.isoformat(),
            "agent_id": self.agent_id,
            "views": self.views,
            "likes": self.likes,
            "comments": self.comments,
            "shares": self.shares,
        }


@dataclass(frozen=True)
class EventState:
    """Cumulative engagement on an event plus its per-day history.

    ``day`` is the next day to be simulated; history holds one aggregate per
    finished day.
    """

    day: int = 1
    views: int = 0
    likes: int = 0
    comments: int = 0
    shares: int = 0
    history: tuple[DailyEngagement, ...] = ()

    def counters(self) -> tuple[int, int, int, int]:
        return (self.views, self.likes, self.comments, self.shares)

    def to_dict(self) -> dict[str, Any]:
        return {
            "day": self.day,
            "views": self.views,
            "likes": self.likes,
            "comments": self.comments,
            "shares": self.shares,
            "history": [h.to_dict() for h in self.history],
        }


# =============================================================================
# Fading / memory configuration
# =============================================================================

DEFAULT_ALPHA = (0.5, 0.35, 0.15)
DEFAULT_FADING_RATE = {
    Characteristic.SUSCEPTIBLE: 0.35,
    Characteristic.ORDINARY: 0.25,
    Characteristic.CALM: 0.15,
}
DEFAULT_AMPLITUDE = {
    Characteristic.SUSCEPTIBLE: 1.0,
    Characteristic.ORDINARY: 0.6,
    Characteristic.CALM: 0.3,
}
DEFAULT_FORGETTING_P = 0.2
DEFAULT_MEMORY_CAPACITY = 16


def _characteristic_map(
    raw: Optional[Mapping[Any, Any]], defaults: Mapping[Characteristic, float], name: str
) -> dict[Characteristic, float]:
    result = dict(defaults)
    for key, value in (raw or {}).items():
        try:
            char = Characteristic(key.value if isinstance(key, Characteristic) else str(key))
        except ValueError:
            raise InvalidConfigurationError(name, key, "unknown characteristic")
        try:
            result[char] = float(value)
        except (TypeError, ValueError):
            raise InvalidConfigurationError(f"{name}.{char.value}", value, "must be a number")
    return result


@dataclass(frozen=True)
class FadingConfig:
    """Mixing weights, fading, forgetting and amplitude parameters.

    Build through :meth:`create`, which normalises ``alpha`` and validates
    every range.
    """

    alpha: tuple[float, float, float] = DEFAULT_ALPHA
    fading_rate: Mapping[Characteristic, float] = field(
        default_factory=lambda: dict(DEFAULT_FADING_RATE)
    )
    forgetting_p: float = DEFAULT_FORGETTING_P
    memory_capacity: int = DEFAULT_MEMORY_CAPACITY
    amplitude: Mapping[Characteristic, float] = field(
        default_factory=lambda: dict(DEFAULT_AMPLITUDE)
    )

    @classmethod
    def create(
        cls,
        alpha: Sequence[float] = DEFAULT_ALPHA,
        fading_rate: Optional[Mapping[Any, Any]] = None,
        forgetting_p: float = DEFAULT_FORGETTING_P,
        memory_capacity: int = DEFAULT_MEMORY_CAPACITY,
        amplitude: Optional[Mapping[Any, Any]] = None,
    ) -> "FadingConfig":
        if len(alpha) != 3:
            raise InvalidConfigurationError("reasoning.alpha", alpha, "must have three entries")
        weights = [float(a) for a in alpha]
        if any(not math.isfinite(a) or a < 0 for a in weights):
            raise InvalidConfigurationError("reasoning.alpha", alpha, "must be non-negative")
        total = sum(weights)
        if total <= 0:
            raise InvalidConfigurationError("reasoning.alpha", alpha, "must not sum to zero")
        norm = (weights[0] / total, weights[1] / total, weights[2] / total)

        rates = _characteristic_map(fading_rate, DEFAULT_FADING_RATE, "reasoning.fading_rate")
        for char, rate in rates.items():
            if not 0.0 <= rate <= 1.0:
                raise InvalidConfigurationError(
                    f"reasoning.fading_rate.{char.value}", rate, "must lie in [0, 1]"
                )

        amps = _characteristic_map(amplitude, DEFAULT_AMPLITUDE, "reasoning.amplitude")
        for char, amp in amps.items():
            if not 0.0 < amp <= 1.0:
                raise InvalidConfigurationError(
                    f"reasoning.amplitude.{char.value}", amp, "must lie in (0, 1]"
                )
        if not (
            amps[Characteristic.SUSCEPTIBLE]
            >= amps[Characteristic.ORDINARY]
            >= amps[Characteristic.CALM]
        ):
            raise InvalidConfigurationError(
                "reasoning.amplitude", amps, "must order susceptible >= ordinary >= calm"
            )

        if not 0.0 <= float(forgetting_p) <= 1.0:
            raise InvalidConfigurationError(
                "reasoning.forgetting_p", forgetting_p, "must lie in [0, 1]"
            )
        if int(memory_capacity) < 1:
            raise InvalidConfigurationError(
                "reasoning.memory_capacity", memory_capacity, "must be at least 1"
            )

        return cls(
            alpha=norm,
            fading_rate=rates,
            forgetting_p=float(forgetting_p),
            memory_capacity=int(memory_capacity),
            amplitude=amps,
        )

    def ablate(self, *, use_state: bool = True, use_memory: bool = True) -> "FadingConfig":
        """Zero the persistence and/or memory weight and renormalise."""
        a1, a2, a3 = self.alpha
        a1 = a1 if use_state else 0.0
        a3 = a3 if use_memory else 0.0
        total = a1 + a2 + a3
        if total <= 0:
            return replace(self, alpha=(0.0, 1.0, 0.0))
        return replace(self, alpha=(a1 / total, a2 / total, a3 / total))

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": list(self.alpha),
            "fading_rate": {c.value: r for c, r in self.fading_rate.items()},
            "forgetting_p": self.forgetting_p,
            "memory_capacity": self.memory_capacity,
            "amplitude": {c.value: a for c, a in self.amplitude.items()},
        }


# =============================================================================
# Heat schedules
# =============================================================================

# Relative event heat per day, day 1 = 1.0.
HEAT_SCHEDULES: dict[str, tuple[float, ...]] = {
    "single_peak_day2": (1.0, 1.7, 0.9, 0.5, 0.3, 0.18, 0.1),
    "single_peak_day3": (1.0, 1.6, 2.6, 1.2, 0.6, 0.3, 0.15),
    "double_peak": (1.0, 1.8, 0.8, 0.5, 1.1, 0.5, 0.25),
    "plateau": (1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0),
    "impulse": (1.0, 0.3, 0.1, 0.05, 0.02, 0.01, 0.005),
}


@dataclass(frozen=True)
class HeatSchedule:
    """Named multiplier series; past its end the last value halves each day."""

    name: str
    values: tuple[float, ...]

    @classmethod
    def named(cls, name: str) -> "HeatSchedule":
        try:
            return cls(name, HEAT_SCHEDULES[name])
        except KeyError:
            raise InvalidConfigurationError(
                "heat_schedule", name, f"must be one of: {', '.join(sorted(HEAT_SCHEDULES))}"
            )

    def __call__(self, day: int) -> float:
        if day < 1 or not self.values:
            return 0.0
        if day <= len(self.values):
            return self.values[day - 1]
        return self.values[-1] * 0.5 ** (day - len(self.values))
