"""Reasoning engine.

Perception, emotion update with character amplitude, state mixing, fading,
action choice and memory with forgetting. The module-level functions are
pure; :class:`ReasoningEngine` binds them to a gateway and a config.
"""

from __future__ import annotations

import logging
from datetime import date
from typing import Collection, Optional

import numpy as np

from ..config import PerceptionSettings
from ..core.exceptions import ValidationError
from ..core.logging import get_logger
from ..core.models import (
    ActionDecision,
    ActionKind,
    AgentState,
    Characteristic,
    DailyEngagement,
    Domain,
    EmotionState,
    EventRecord,
    EventState,
    FadingConfig,
    GroupAgent,
    HeatSchedule,
    Memory,
    MemoryItem,
    MemoryKind,
    Perception,
    Sentiment,
)
from ..oracle.gateway import AgentView, OracleGateway

GROWTH_CLIP = 0.5

log = get_logger(__name__)


# =============================================================================
# Perception
# =============================================================================


def view_growth(event_state: EventState) -> float:
    """Relative change of the last two daily view totals, clipped."""
    if len(event_state.history) < 2:
        return 0.0
    previous = event_state.history[-2].views
    latest = event_state.history[-1].views
    growth = (latest - previous) / max(previous, 1)
    return float(np.clip(growth, -GROWTH_CLIP, GROWTH_CLIP))


def perceive(
    event_state: EventState,
    event: EventRecord,
    day: int,
    settings: PerceptionSettings,
    *,
    domain: Optional[Domain] = None,
    country: Optional[str] = None,
) -> Perception:
    """Agent-independent view of the event at the start of ``day``.

    Counters are the cumulative totals at the end of the previous day.
    """
    if day < 1:
        raise ValidationError(f"Day must be >= 1, got {day}", operation="perceive")
    schedule = HeatSchedule.named(settings["heat_schedule"])
    growth = 0.0 if day == 1 else view_growth(event_state)
    heat = settings["initial_heat"] * schedule(day) * (1.0 + settings["feedback_gain"] * growth)
    return Perception(
        day=day,
        event_summary=event.summary,
        domain=domain or event.domain,
        country=country or event.country,
        event_counters=event_state.counters(),
        heat=max(heat, 0.0),
        sentiment=Sentiment(settings["sentiment"]),
    )


# =============================================================================
# Emotions and state
# =============================================================================


def amplify_change(
    prev: EmotionState, raw: EmotionState, characteristic: Characteristic, config: FadingConfig
) -> EmotionState:
    """Scale each channel's change from ``prev`` by the character amplitude."""
    amplitude = config.amplitude[characteristic]
    prev_vec = prev.as_vector()
    return EmotionState.from_vector(prev_vec + amplitude * (raw.as_vector() - prev_vec))


def update_emotion(
    view: AgentView, config: FadingConfig, gateway: OracleGateway
) -> EmotionState:
    """Ask the oracle for fresh emotions and apply the character amplitude."""
    characteristic = view.agent.characteristic
    raw = gateway.query_emotion_update(view, config.fading_rate[characteristic])
    return amplify_change(view.state.emotions, raw, characteristic, config)


def apply_fading(
    emotions: EmotionState, characteristic: Characteristic, config: FadingConfig
) -> EmotionState:
    rate = config.fading_rate[characteristic]
    return EmotionState.from_vector(emotions.as_vector() * (1.0 - rate))


def memory_influence(memory: Memory) -> np.ndarray:
    """Salience-weighted mean of the emotion snapshots held in memory."""
    snapshots = [m for m in memory.items if m.emotions is not None and m.salience > 0]
    if not snapshots:
        return np.zeros(5)
    weights = np.array([m.salience for m in snapshots], dtype=float)
    vectors = np.stack([m.emotions.as_vector() for m in snapshots if m.emotions is not None])
    return np.asarray(weights @ vectors / weights.sum(), dtype=float)


def transition_state(
    prev: AgentState, emotion: EmotionState, memory: Memory, config: FadingConfig
) -> AgentState:
    """Convex mix of persistence, fresh response and memory; advances the day."""
    a1, a2, a3 = config.alpha
    mixed = (
        a1 * prev.emotions.as_vector()
        + a2 * emotion.as_vector()
        + a3 * memory_influence(memory)
    )
    return AgentState(
        emotions=EmotionState.from_vector(mixed),
        day=prev.day + 1,
        last_action=prev.last_action,
        prediction=prev.prediction,
    )


# =============================================================================
# Decisions and memory
# =============================================================================


def decide_action(
    view: AgentView, available: Collection[ActionKind], gateway: OracleGateway
) -> ActionDecision:
    """Policy step; the returned action is always one of ``available``.

    Raises:
        ValidationError: If ``available`` is empty.
        IllegalAction: If the oracle picks something else.
    """
    if not available:
        raise ValidationError("No available actions", operation="decide_action")
    return gateway.query_decision(view, available)


def _salience(heat: float) -> float:
    return heat / (1.0 + heat)


def update_memory(
    memory: Memory,
    decision: ActionDecision,
    perception: Perception,
    config: FadingConfig,
    rng: np.random.Generator,
    *,
    emotions: Optional[EmotionState] = None,
    outcome: Optional[DailyEngagement] = None,
) -> Memory:
    """Forget, then enqueue today's perception, decision and optional outcome.

    Each existing item is dropped independently with ``forgetting_p``; the
    queue is then trimmed from the oldest end to its capacity.
    """
    p = config.forgetting_p
    survivors = [item for item in memory.items if rng.random() >= p]

    salience = _salience(perception.heat)
    survivors.append(
        MemoryItem(
            kind=MemoryKind.PERCEPTION,
            day=perception.day,
            payload=f"{perception.event_summary} ({perception.counters_text()})",
            salience=salience,
            emotions=emotions,
        )
    )
    survivors.append(
        MemoryItem(
            kind=MemoryKind.DECISION,
            day=perception.day,
            payload=f"{decision.action.value}: {decision.reason}".strip(),
            salience=emotions.intensity if emotions is not None else 0.5,
            emotions=emotions,
        )
    )
    if outcome is not None:
        survivors.append(
            MemoryItem(
                kind=MemoryKind.ACTION,
                day=perception.day,
                payload=(
                    f"views={outcome.views}, likes={outcome.likes}, "
                    f"comments={outcome.comments}, shares={outcome.shares}"
                ),
                salience=salience,
                emotions=emotions,
            )
        )

    return Memory(items=tuple(survivors[-memory.capacity :]), capacity=memory.capacity)


# =============================================================================
# Service
# =============================================================================


class ReasoningEngine:
    """Per-agent reasoning bound to one gateway and one config.

    Args:
        gateway: Oracle gateway.
        fading: Mixing, fading and forgetting parameters.
        perception: Heat settings.
        use_memory: Keep the memory term and memory updates.
        use_state: Keep the persistence term.
    """

    def __init__(
        self,
        gateway: OracleGateway,
        fading: FadingConfig,
        perception: PerceptionSettings,
        *,
        use_memory: bool = True,
        use_state: bool = True,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.gateway = gateway
        self.fading = fading.ablate(use_state=use_state, use_memory=use_memory)
        self.settings = perception
        self.use_memory = use_memory
        self.log = logger or log

    def perceive(
        self,
        event_state: EventState,
        event: EventRecord,
        day: int,
        *,
        domain: Optional[Domain] = None,
        country: Optional[str] = None,
    ) -> Perception:
        return perceive(event_state, event, day, self.settings, domain=domain, country=country)

    def view(
        self,
        agent: GroupAgent,
        perception: Perception,
        start_date: date,
        run_seed: int,
        state: Optional[AgentState] = None,
    ) -> AgentView:
        return AgentView(
            agent=agent,
            perception=perception,
            state=state or agent.state,
            memory=agent.memory,
            start_date=start_date,
            run_seed=run_seed,
        )

    def feel(self, view: AgentView) -> AgentState:
        """Emotion update, state transition and fading for one day."""
        characteristic = view.agent.characteristic
        fresh = update_emotion(view, self.fading, self.gateway)
        mixed = transition_state(view.state, fresh, view.memory, self.fading)
        faded = apply_fading(mixed.emotions, characteristic, self.fading)
        return AgentState(
            emotions=faded,
            day=mixed.day,
            last_action=mixed.last_action,
            prediction=mixed.prediction,
        )

    def decide(self, view: AgentView, available: Collection[ActionKind]) -> ActionDecision:
        decision = decide_action(view, available, self.gateway)
        self.log.debug(
            "%s chose %s on day %d", view.agent.id, decision.action.value, view.perception.day
        )
        return decision

    def remember(
        self,
        memory: Memory,
        decision: ActionDecision,
        perception: Perception,
        rng: np.random.Generator,
        *,
        emotions: Optional[EmotionState] = None,
        outcome: Optional[DailyEngagement] = None,
    ) -> Memory:
        if not self.use_memory:
            return memory
        return update_memory(
            memory, decision, perception, self.fading, rng, emotions=emotions, outcome=outcome
        )
