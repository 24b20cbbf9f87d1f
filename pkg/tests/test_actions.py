"""Tests for groupsim.services.actions."""

from __future__ import annotations

import logging
from datetime import date

import pytest

from groupsim.core.exceptions import MixedDates, NoOptions, ScalingOverflow, ValidationError
from groupsim.core.models import (
    ACTION_FIELDS,
    AgentState,
    Characteristic,
    DailyEngagement,
    Domain,
    EventState,
    GroupAgent,
    Memory,
    Perception,
    Prediction,
)
from groupsim.oracle import AgentView, OracleGateway
from groupsim.services.actions import (
    ActionEngine,
    aggregate_event_state,
    engagement_rows,
    enforce_engagement_laws,
    generate_engagement,
    predict_outcome,
    tally_seats,
)

DAY1 = date(2024, 3, 1)
DAY2 = date(2024, 3, 2)


class _FixedOracle:
    """Oracle double that always returns the same engagement block."""

    name = "fixed"
    supports_group_search = False

    def __init__(self, views: int, likes: int, comments: int, shares: int) -> None:
        self.reply = f"Views: {views}\nLikes: {likes}\nComments: {comments}\nShares: {shares}"

    def complete(self, request, prompt):
        return self.reply


def _agent(agent_id: str, population: int = 1000) -> GroupAgent:
    return GroupAgent(
        id=agent_id,
        name=agent_id,
        country="CN",
        population=population,
        characteristic=Characteristic.ORDINARY,
        description=f"Representing {population} CN {agent_id}",
    )


def _view(agent: GroupAgent) -> AgentView:
    perception = Perception(
        day=1,
        event_summary="Exam reform",
        domain=Domain.EDUCATION,
        country="CN",
        event_counters=(0, 0, 0, 0),
        heat=1.0,
    )
    return AgentView(
        agent=agent, perception=perception, state=AgentState(), memory=Memory(), start_date=DAY1
    )


def _voting(option: str, confidence: float = 1.0) -> AgentState:
    return AgentState(prediction=Prediction(option=option, confidence=confidence))


class TestEnforceEngagementLaws:
    """Tests for enforce_engagement_laws."""

    def test_valid_reply_untouched(self):
        engagement = DailyEngagement(DAY1, views=1000, likes=100, comments=40, shares=20)
        repaired, repairs = enforce_engagement_laws(engagement, 5000)
        assert repaired.counts() == engagement.counts()
        assert repairs == []

    def test_all_laws_repaired(self):
        engagement = DailyEngagement(DAY1, views=9000, likes=2000, comments=900, shares=700)
        repaired, repairs = enforce_engagement_laws(engagement, 5000, agent_id="a")
        assert repaired.counts() == (5000, 500, 500, 500)
        assert repaired.agent_id == "a"
        assert len(repairs) == 4

    def test_heated_allows_comments_above_likes(self):
        engagement = DailyEngagement(DAY1, views=1000, likes=50, comments=300, shares=80)
        repaired, _ = enforce_engagement_laws(engagement, 5000, heated=True)
        assert repaired.counts() == (1000, 50, 300, 80)

    def test_strict_overflow(self):
        engagement = DailyEngagement(DAY1, views=9000)
        with pytest.raises(ScalingOverflow) as exc_info:
            enforce_engagement_laws(engagement, 5000, strict=True, agent_id="a")
        assert exc_info.value.population == 5000


class TestGenerateEngagement:
    """Tests for generate_engagement."""

    def test_overshoot_is_repaired_and_logged(self, caplog):
        gateway = OracleGateway(_FixedOracle(2000, 500, 900, 10))
        with caplog.at_level(logging.WARNING):
            engagement = generate_engagement(_view(_agent("a")), 0.5, gateway, forgetting_p=0.2)
        assert engagement.counts() == (1000, 100, 100, 10)
        assert engagement.agent_id == "a"
        assert engagement.date == DAY1
        assert any("Repaired engagement" in r.getMessage() for r in caplog.records)

    def test_strict_mode_raises(self):
        gateway = OracleGateway(_FixedOracle(2000, 0, 0, 0))
        with pytest.raises(ScalingOverflow):
            generate_engagement(_view(_agent("a")), 0.5, gateway, forgetting_p=0.2, strict=True)

    def test_empty_group_skips_oracle(self):
        gateway = OracleGateway(_FixedOracle(5, 0, 0, 0))
        engagement = generate_engagement(_view(_agent("a", 0)), 0.0, gateway, forgetting_p=0.2)
        assert engagement.counts() == (0, 0, 0, 0)
        assert gateway.request_count == 0

    @pytest.mark.parametrize("weight", [-0.1, 1.5])
    def test_weight_out_of_range(self, gateway, weight):
        with pytest.raises(ValidationError):
            generate_engagement(_view(_agent("a")), weight, gateway, forgetting_p=0.2)

    def test_engine_heated(self):
        gateway = OracleGateway(_FixedOracle(1000, 50, 300, 80))
        engine = ActionEngine(gateway, forgetting_p=0.2, heated=True)
        assert engine.engage(_view(_agent("a")), 1.0).comments == 300


class TestAggregateEventState:
    """Tests for aggregate_event_state."""

    def test_sums_and_history(self):
        day1 = [
            DailyEngagement(DAY1, 100, 10, 2, 1, agent_id="b"),
            DailyEngagement(DAY1, 50, 5, 1, 0, agent_id="a"),
        ]
        state = aggregate_event_state(EventState(), day1)
        assert state.counters() == (150, 15, 3, 1)
        assert state.day == 2
        day2 = [DailyEngagement(DAY2, 30, 3, 0, 0, agent_id="a")]
        state = aggregate_event_state(state, day2)
        assert state.counters() == (180, 18, 3, 1)
        assert [h.views for h in state.history] == [150, 30]

    def test_order_independent(self):
        rows = [DailyEngagement(DAY1, v, 0, 0, 0, agent_id=str(v)) for v in (3, 1, 2)]
        assert aggregate_event_state(EventState(), rows) == aggregate_event_state(
            EventState(), list(reversed(rows))
        )

    def test_mixed_dates(self):
        rows = [DailyEngagement(DAY1, 1, agent_id="a"), DailyEngagement(DAY2, 1, agent_id="b")]
        with pytest.raises(MixedDates) as exc_info:
            aggregate_event_state(EventState(), rows)
        assert exc_info.value.dates == ["2024-03-01", "2024-03-02"]

    def test_empty_day_advances(self):
        state = aggregate_event_state(EventState(day=3, views=10), [])
        assert state.day == 4
        assert state.views == 10

    def test_engagement_rows(self):
        days = [[DailyEngagement(DAY1, 5, agent_id="b"), DailyEngagement(DAY1, 7, agent_id="a")]]
        rows = engagement_rows("e1", days)
        assert [r["agent_id"] for r in rows] == ["a", "b"]
        assert rows[0]["views"] == 7
        assert rows[0]["day"] == 1
        assert set(rows[0]) == {"event_id", "day", "agent_id", *ACTION_FIELDS}


class TestPredictOutcome:
    """Tests for predict_outcome and tally_seats."""

    OPTIONS = ["Oppose", "Support"]

    def test_unanimous(self):
        agents = [_agent("a"), _agent("b")]
        states = [_voting("Support", 0.9), _voting("Support", 0.4)]
        summary = predict_outcome(agents, states, self.OPTIONS, {"a": 0.7, "b": 0.3})
        assert summary.support == {"Oppose": 0.0, "Support": 1.0}
        assert summary.winner == "Support"
        assert summary.voters == 2

    def test_weighted_support(self):
        agents = [_agent("a"), _agent("b")]
        states = [_voting("Support", 1.0), _voting("Oppose", 0.5)]
        summary = predict_outcome(agents, states, self.OPTIONS, {"a": 0.2, "b": 0.8})
        assert summary.support["Oppose"] == pytest.approx(0.4 / 0.6)
        assert summary.winner == "Oppose"

    def test_scale_invariant(self):
        agents = [_agent("a"), _agent("b")]
        states = [_voting("Support", 0.6), _voting("Oppose", 0.9)]
        base = predict_outcome(agents, states, self.OPTIONS, {"a": 0.3, "b": 0.1})
        scaled = predict_outcome(agents, states, self.OPTIONS, {"a": 30.0, "b": 10.0})
        assert scaled.support == pytest.approx(base.support)
        assert scaled.winner == base.winner

    def test_tie_goes_to_smallest_name(self):
        agents = [_agent("a"), _agent("b")]
        states = [_voting("Support"), _voting("Oppose")]
        summary = predict_outcome(agents, states, ["Support", "Oppose"], {"a": 0.5, "b": 0.5})
        assert summary.winner == "Oppose"

    def test_no_support_is_uniform(self, caplog):
        with caplog.at_level(logging.WARNING):
            summary = predict_outcome([_agent("a")], [AgentState()], ["x", "y"], {"a": 1.0})
        assert summary.support == {"x": 0.5, "y": 0.5}
        assert summary.winner == "x"
        assert summary.voters == 0

    def test_no_options(self):
        with pytest.raises(NoOptions):
            predict_outcome([], [], [], {})

    def test_unknown_option(self):
        with pytest.raises(ValidationError):
            predict_outcome([_agent("a")], [_voting("Maybe")], self.OPTIONS, {"a": 1.0})

    def test_tally_seats(self):
        agents = [_agent("a"), _agent("b"), _agent("c")]
        states = [_voting("Support"), _voting("Oppose"), _voting("Support")]
        seats = {"a": 20, "b": 35, "c": 10}
        assert tally_seats(agents, states, seats, self.OPTIONS) == {"Oppose": 35, "Support": 30}
