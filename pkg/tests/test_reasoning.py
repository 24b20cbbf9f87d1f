"""Tests for groupsim.services.reasoning."""

from __future__ import annotations

from datetime import date

import numpy as np
import pytest

from groupsim.core.exceptions import ValidationError
from groupsim.core.models import (
    ActionDecision,
    ActionKind,
    AgentState,
    Characteristic,
    DailyEngagement,
    Domain,
    EmotionState,
    EventState,
    FadingConfig,
    GroupAgent,
    Memory,
    MemoryItem,
    MemoryKind,
    Perception,
)
from groupsim.oracle import AgentView, OracleGateway, StubOracle
from groupsim.services.reasoning import (
    ReasoningEngine,
    amplify_change,
    apply_fading,
    decide_action,
    memory_influence,
    perceive,
    transition_state,
    update_emotion,
    update_memory,
    view_growth,
)

START = date(2024, 3, 1)


def _agent(characteristic: Characteristic = Characteristic.ORDINARY) -> GroupAgent:
    return GroupAgent(
        id="Students-agents",
        name="Students",
        country="CN",
        population=1_000_000,
        characteristic=characteristic,
        description="Representing 1,000,000 CN Students",
    )


def _item(salience: float, anger: float, day: int = 1) -> MemoryItem:
    return MemoryItem(
        kind=MemoryKind.PERCEPTION,
        day=day,
        payload="seen",
        salience=salience,
        emotions=EmotionState(anger=anger),
    )


def _perception(day: int = 1, heat: float = 1.0) -> Perception:
    return Perception(
        day=day,
        event_summary="Exam reform",
        domain=Domain.EDUCATION,
        country="CN",
        event_counters=(0, 0, 0, 0),
        heat=heat,
    )


def _memory(n: int, capacity: int = 100) -> Memory:
    return Memory(items=tuple(_item(0.5, 0.1, day=i) for i in range(n)), capacity=capacity)


class TestPerceive:
    """Tests for perceive and view_growth."""

    def test_first_day(self, cfg, event_02):
        perception = perceive(EventState(), event_02, 1, cfg["perception"])
        assert perception.heat == pytest.approx(1.0)
        assert perception.event_counters == (0, 0, 0, 0)
        assert perception.country == "CN"

    def test_feedback_from_growth(self, cfg, event_02):
        history = (
            DailyEngagement(date=START, views=100),
            DailyEngagement(date=date(2024, 3, 2), views=300),
        )
        state = EventState(day=3, views=400, history=history)
        assert view_growth(state) == pytest.approx(0.5)
        perception = perceive(state, event_02, 3, cfg["perception"])
        schedule_day3 = 0.9
        assert perception.heat == pytest.approx(schedule_day3 * (1 + 0.05 * 0.5))
        assert perception.event_counters[0] == 400

    def test_day_zero(self, cfg, event_02):
        with pytest.raises(ValidationError):
            perceive(EventState(), event_02, 0, cfg["perception"])


class TestEmotionUpdate:
    """Tests for amplitude, fading and the oracle-backed update."""

    def test_amplify_change(self):
        config = FadingConfig.create()
        prev = EmotionState(anger=0.2)
        raw = EmotionState(anger=0.8, sadness=0.5)
        result = amplify_change(prev, raw, Characteristic.CALM, config)
        assert result.anger == pytest.approx(0.2 + 0.3 * 0.6)
        assert result.sadness == pytest.approx(0.15)

    def test_apply_fading(self):
        config = FadingConfig.create()
        faded = apply_fading(EmotionState(anger=0.5), Characteristic.ORDINARY, config)
        assert faded.anger == pytest.approx(0.375)

    def test_update_emotion_applies_amplitude(self, gateway, cfg, event_02):
        view = AgentView(
            agent=_agent(Characteristic.CALM),
            perception=perceive(EventState(), event_02, 1, cfg["perception"]),
            state=AgentState(),
            memory=Memory(),
            start_date=START,
        )
        raw = gateway.query_emotion_update(view, 0.15)
        amplified = update_emotion(view, FadingConfig.create(), gateway)
        np.testing.assert_allclose(amplified.as_vector(), 0.3 * raw.as_vector())


class TestTransitionState:
    """Tests for transition_state and memory_influence."""

    def test_worked_example(self):
        config = FadingConfig.create(alpha=(0.5, 0.35, 0.15))
        prev = AgentState(emotions=EmotionState(anger=0.4), day=2)
        memory = Memory(items=(_item(1.0, 0.2),))
        result = transition_state(prev, EmotionState(anger=0.8), memory, config)
        assert result.emotions.anger == pytest.approx(0.51)
        assert result.day == 3

    def test_memory_influence_weighted(self):
        memory = Memory(items=(_item(1.0, 0.2), _item(3.0, 0.6)))
        assert memory_influence(memory)[2] == pytest.approx(0.5)

    def test_memory_influence_empty(self):
        np.testing.assert_array_equal(memory_influence(Memory()), np.zeros(5))

    def test_result_stays_in_range(self):
        config = FadingConfig.create()
        prev = AgentState(emotions=EmotionState(1, 1, 1, 1, 1))
        memory = Memory(items=(_item(1.0, 1.0),))
        result = transition_state(prev, EmotionState(1, 1, 1, 1, 1), memory, config)
        assert np.all(result.emotions.as_vector() <= 1.0)


class TestCharacterOrdering:
    """Susceptible groups swing harder than ordinary ones, ordinary harder than calm."""

    def _max_swing(self, engine, event, characteristic, seed):
        agent = _agent(characteristic)
        state = agent.state
        swings = np.zeros(5)
        for day in range(1, 8):
            perception = engine.perceive(EventState(), event, day)
            view = engine.view(agent, perception, START, seed, state=state)
            new_state = engine.feel(view)
            swings = np.maximum(
                swings, np.abs(new_state.emotions.as_vector() - state.emotions.as_vector())
            )
            state = new_state
        return swings

    @pytest.mark.parametrize("seed", range(20))
    def test_ordering_holds(self, cfg, event_02, seed):
        engine = ReasoningEngine(
            OracleGateway(StubOracle(seed=seed, settings=cfg["stub"])),
            cfg["fading"],
            cfg["perception"],
        )
        susceptible = self._max_swing(engine, event_02, Characteristic.SUSCEPTIBLE, seed)
        ordinary = self._max_swing(engine, event_02, Characteristic.ORDINARY, seed)
        calm = self._max_swing(engine, event_02, Characteristic.CALM, seed)
        assert np.all(susceptible >= ordinary)
        assert np.all(ordinary >= calm)
        assert susceptible.max() > calm.max()


class TestDecideAction:
    def test_empty_available(self, gateway):
        with pytest.raises(ValidationError):
            decide_action(None, [], gateway)  # type: ignore[arg-type]


class TestUpdateMemory:
    """Tests for memory updates with forgetting."""

    def _decision(self) -> ActionDecision:
        return ActionDecision(ActionKind.VIEW, "first exposure")

    def test_no_forgetting(self):
        config = FadingConfig.create(forgetting_p=0.0, memory_capacity=100)
        memory = update_memory(
            _memory(5), self._decision(), _perception(), config, np.random.default_rng(0)
        )
        assert len(memory) == 7
        assert [m.kind for m in memory.items[-2:]] == [MemoryKind.PERCEPTION, MemoryKind.DECISION]

    def test_total_forgetting(self):
        config = FadingConfig.create(forgetting_p=1.0, memory_capacity=100)
        memory = update_memory(
            _memory(5), self._decision(), _perception(), config, np.random.default_rng(0)
        )
        assert len(memory) == 2

    def test_outcome_appended(self):
        config = FadingConfig.create(forgetting_p=0.0)
        outcome = DailyEngagement(date=START, views=10, likes=1)
        rng = np.random.default_rng(0)
        memory = update_memory(
            Memory(), self._decision(), _perception(), config, rng, outcome=outcome
        )
        assert memory.items[-1].kind is MemoryKind.ACTION
        assert "views=10" in memory.items[-1].payload

    def test_capacity_evicts_oldest(self):
        config = FadingConfig.create(forgetting_p=0.0, memory_capacity=4)
        rng = np.random.default_rng(0)
        memory = update_memory(_memory(4, capacity=4), self._decision(), _perception(), config, rng)
        assert len(memory) == 4
        assert [m.day for m in memory.items[:2]] == [2, 3]

    def test_expected_survivors(self):
        """Mean survivors of n=10 at p=0.2 is 8 within three standard errors."""
        config = FadingConfig.create(forgetting_p=0.2, memory_capacity=100)
        rng = np.random.default_rng(2024)
        prior = _memory(10)
        trials = 10_000
        survivors = np.empty(trials)
        for i in range(trials):
            updated = update_memory(prior, self._decision(), _perception(), config, rng)
            assert len(updated) <= updated.capacity
            survivors[i] = len(updated) - 2
        standard_error = np.sqrt(10 * 0.2 * 0.8 / trials)
        assert abs(survivors.mean() - 8.0) < 3 * standard_error

    def test_engine_without_memory_keeps_memory(self, gateway, cfg):
        engine = ReasoningEngine(gateway, cfg["fading"], cfg["perception"], use_memory=False)
        memory = _memory(3)
        result = engine.remember(memory, self._decision(), _perception(), np.random.default_rng(0))
        assert result is memory
        assert engine.fading.alpha[2] == 0.0
