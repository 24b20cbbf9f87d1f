"""Action engine: engagement generation, event-state aggregation, prediction."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Sequence

from ..core.exceptions import MixedDates, NoOptions, ScalingOverflow, ValidationError
from ..core.logging import get_logger
from ..core.models import (
    ActionKind,
    AgentState,
    DailyEngagement,
    EventState,
    GroupAgent,
)
from ..oracle.gateway import AgentView, OracleGateway

log = get_logger(__name__)


# =============================================================================
# Engagement
# =============================================================================


def enforce_engagement_laws(
    engagement: DailyEngagement,
    population: int,
    *,
    heated: bool = False,
    strict: bool = False,
    agent_id: str = "",
) -> tuple[DailyEngagement, list[str]]:
    """Repair a reply so it respects population and the ordering laws.

    Views are capped at ``population``; likes at views // 10; unless the
    event is heated, comments and shares at likes. Returns the repaired
    engagement plus a description of every repair made.

    Raises:
        ScalingOverflow: In strict mode, if views exceed the population.
    """
    repairs: list[str] = []
    views, likes, comments, shares = engagement.counts()

    if views > population:
        if strict:
            raise ScalingOverflow(agent_id, views, population)
        repairs.append(f"views {views} -> {population} (population)")
        views = population
    if likes > views // 10:
        repairs.append(f"likes {likes} -> {views // 10} (views >= 10 x likes)")
        likes = views // 10
    if not heated:
        if comments > likes:
            repairs.append(f"comments {comments} -> {likes} (likes >= comments)")
            comments = likes
        if shares > likes:
            repairs.append(f"shares {shares} -> {likes} (likes >= shares)")
            shares = likes

    repaired = replace(
        engagement,
        views=views,
        likes=likes,
        comments=comments,
        shares=shares,
        agent_id=agent_id or engagement.agent_id,
    )
    return repaired, repairs


def generate_engagement(
    view: AgentView,
    weight: float,
    gateway: OracleGateway,
    *,
    forgetting_p: float,
    action: Optional[ActionKind] = None,
    heated: bool = False,
    strict: bool = False,
    logger: Optional[logging.Logger] = None,
) -> DailyEngagement:
    """One agent's engagement for the perceived day.

    Raises:
        ValidationError: If ``weight`` is outside [0, 1].
        ScalingOverflow: In strict mode, if the oracle overshoots the population.
    """
    logger = logger or log
    if not 0.0 <= weight <= 1.0:
        raise ValidationError(
            f"Population weight must lie in [0, 1], got {weight}",
            details={"agent": view.agent.id},
            operation="generate_engagement",
        )
    agent = view.agent
    if agent.population <= 0:
        return DailyEngagement(date=view.event_date, agent_id=agent.id)

    raw = gateway.query_engagement(
        view, weight=weight, forgetting_p=forgetting_p, action=action, heated=heated
    )
    engagement, repairs = enforce_engagement_laws(
        raw, agent.population, heated=heated, strict=strict, agent_id=agent.id
    )
    if repairs:
        logger.warning(
            "Repaired engagement for %s on day %d: %s",
            agent.id,
            view.perception.day,
            "; ".join(repairs),
        )
    return engagement


def aggregate_event_state(
    prev: EventState, engagements: Sequence[DailyEngagement]
) -> EventState:
    """Add one day's engagements to the cumulative state.

    Sums run over agent-id order, so the result does not depend on the order
    engagements arrive in.

    Raises:
        MixedDates: If the engagements are not all from the same date.
    """
    if not engagements:
        return replace(prev, day=prev.day + 1)

    dates = sorted({e.date.isoformat() for e in engagements})
    if len(dates) > 1:
        raise MixedDates(dates)

    ordered = sorted(engagements, key=lambda e: e.agent_id)
    views = sum(e.views for e in ordered)
    likes = sum(e.likes for e in ordered)
    comments = sum(e.comments for e in ordered)
    shares = sum(e.shares for e in ordered)
    daily = DailyEngagement(
        date=ordered[0].date, views=views, likes=likes, comments=comments, shares=shares
    )
    return EventState(
        day=prev.day + 1,
        views=prev.views + views,
        likes=prev.likes + likes,
        comments=prev.comments + comments,
        shares=prev.shares + shares,
        history=prev.history + (daily,),
    )


def engagement_rows(
    event_id: str, days: Sequence[Sequence[DailyEngagement]]
) -> list[dict[str, Any]]:
    """Flat CSV rows: event_id, day, agent_id and the four counts."""
    rows = []
    for day, engagements in enumerate(days, start=1):
        for e in sorted(engagements, key=lambda x: x.agent_id):
            rows.append(
                {
                    "event_id": event_id,
                    "day": day,
                    "agent_id": e.agent_id,
                    "views": e.views,
                    "likes": e.likes,
                    "comments": e.comments,
                    "shares": e.shares,
                }
            )
    return rows


# =============================================================================
# Prediction
# =============================================================================


@dataclass(frozen=True)
class OutcomeSummary:
    """Normalised support per option and the winning option."""

    support: Mapping[str, float]
    winner: str
    voters: int = 0
    seats: Mapping[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "support": dict(self.support),
            "winner": self.winner,
            "voters": self.voters,
            "seats": dict(self.seats),
        }


def _check_option(option: str, options: Sequence[str], agent_id: str) -> None:
    if option not in options:
        raise ValidationError(
            f"Prediction {option!r} is not one of the scenario options",
            details={"agent": agent_id},
            operation="predict_outcome",
        )


def predict_outcome(
    agents: Sequence[GroupAgent],
    states: Sequence[AgentState],
    options: Sequence[str],
    weights: Mapping[str, float],
    *,
    logger: Optional[logging.Logger] = None,
) -> OutcomeSummary:
    """Weight x confidence support per option, normalised, with a winner.

    Ties go to the lexicographically smallest option. With no support at
    all the shares are uniform.

    Raises:
        NoOptions: If ``options`` is empty.
    """
    logger = logger or log
    if not options:
        raise NoOptions()

    raw = {option: 0.0 for option in options}
    voters = 0
    for agent, state in zip(agents, states):
        prediction = state.prediction
        if prediction is None:
            continue
        _check_option(prediction.option, options, agent.id)
        raw[prediction.option] += weights.get(agent.id, 0.0) * prediction.confidence
        voters += 1

    total = sum(raw.values())
    if total <= 0:
        logger.warning("No prediction support; using uniform shares")
        support = {option: 1.0 / len(options) for option in options}
    else:
        support = {option: value / total for option, value in raw.items()}

    winner = min(options, key=lambda o: (-support[o], o))
    return OutcomeSummary(support=support, winner=winner, voters=voters)


def tally_seats(
    agents: Sequence[GroupAgent],
    states: Sequence[AgentState],
    seats: Mapping[str, int],
    options: Sequence[str],
) -> dict[str, int]:
    """Winner-take-all seat count: each agent's seats go to its prediction.

    Raises:
        NoOptions: If ``options`` is empty.
    """
    if not options:
        raise NoOptions()
    tally = {option: 0 for option in options}
    for agent, state in zip(agents, states):
        if state.prediction is None:
            continue
        _check_option(state.prediction.option, options, agent.id)
        tally[state.prediction.option] += int(seats.get(agent.id, 0))
    return tally


# =============================================================================
# Service
# =============================================================================


class ActionEngine:
    """Engagement generation bound to one gateway.

    Args:
        gateway: Oracle gateway.
        forgetting_p: Forgetting probability passed to engagement prompts.
        heated: Allow comments and shares to exceed likes.
        strict: Raise on population overflow instead of clamping.
    """

    def __init__(
        self,
        gateway: OracleGateway,
        *,
        forgetting_p: float,
        heated: bool = False,
        strict: bool = False,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.gateway = gateway
        self.forgetting_p = forgetting_p
        self.heated = heated
        self.strict = strict
        self.log = logger or log

    def engage(
        self, view: AgentView, weight: float, action: Optional[ActionKind] = None
    ) -> DailyEngagement:
        return generate_engagement(
            view,
            weight,
            self.gateway,
            forgetting_p=self.forgetting_p,
            action=action,
            heated=self.heated,
            strict=self.strict,
            logger=self.log,
        )

    def aggregate(self, prev: EventState, engagements: Sequence[DailyEngagement]) -> EventState:
        return aggregate_event_state(prev, engagements)

    def outcome(
        self,
        agents: Sequence[GroupAgent],
        states: Sequence[AgentState],
        options: Sequence[str],
        weights: Mapping[str, float],
    ) -> OutcomeSummary:
        return predict_outcome(agents, states, options, weights, logger=self.log)
