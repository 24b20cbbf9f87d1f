"""Simulation runtime: the day-tick loop, traces and replications.

A run instantiates agents once from the group tree, then for every day
computes one shared perception, advances each agent independently and
folds the day's engagements into the event state. Agents only ever see the
previous day's totals, so a day's agents can run in any order or in
parallel and still produce the same trace.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from typing import Any, Mapping, Optional, Sequence

import numpy as np
from tqdm import tqdm

from ..config import PerceptionSettings, RunConfig
from ..core.exceptions import OracleError, SimulationError, ValidationError
from ..core.logging import LogContext, get_logger, get_run_ledger
from ..core.models import (
    ACTION_FIELDS,
    ENGAGEMENT_ACTIONS,
    ActionDecision,
    ActionKind,
    AgentState,
    Characteristic,
    DailyEngagement,
    Domain,
    EmotionState,
    EventRecord,
    EventState,
    GroupAgent,
    HeatSchedule,
    Perception,
    Prediction,
    Sentiment,
    compute_population_weights,
)
from ..core.seeding import agent_rng
from ..core.validation import validate_horizon, validate_layer, validate_seed_list
from ..hierarchy.agents import instantiate_agents
from ..hierarchy.graph import KnowledgeGraph, TreeSource, ensure_tree, retrieve_layer
from ..metrics import ZScoreReport, reproducibility_z
from ..oracle.gateway import OracleGateway
from .actions import ActionEngine, OutcomeSummary, engagement_rows, tally_seats
from .reasoning import ReasoningEngine

TRACE_SCHEMA_VERSION = 1

log = get_logger(__name__)


# =============================================================================
# Scenario and trace types
# =============================================================================


@dataclass(frozen=True)
class Scenario:
    """One event to simulate and how.

    ``heat_schedule`` and ``sentiment`` override the run config when set;
    ``seats`` maps agent id to seats for a winner-take-all tally.
    """

    event: EventRecord
    layer: int = 1
    horizon_days: int = 7
    options: tuple[str, ...] = ()
    heated: bool = False
    heat_schedule: Optional[str] = None
    sentiment: Optional[Sentiment] = None
    seats: Optional[Mapping[str, int]] = None

    def __post_init__(self) -> None:
        validate_layer(self.layer)
        validate_horizon(self.horizon_days)
        if self.heat_schedule is not None:
            HeatSchedule.named(self.heat_schedule)

    @property
    def id(self) -> str:
        return self.event.id


@dataclass(frozen=True)
class AgentDayRecord:
    """One agent's state, decision, engagement and memory after a day."""

    agent_id: str
    state: AgentState
    decision: ActionDecision
    engagement: DailyEngagement
    memory_size: int = 0
    memory_text: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "agent_id": self.agent_id,
            "state": self.state.to_dict(),
            "decision": {
                "action": self.decision.action.value,
                "reason": self.decision.reason,
                "plan": list(self.decision.plan),
            },
            "engagement": self.engagement.to_dict(),
            "memory_size": self.memory_size,
            "memory": self.memory_text,
        }


@dataclass(frozen=True)
class DayRecord:
    day: int
    date: date
    perception: Perception
    agents: tuple[AgentDayRecord, ...]

    @property
    def engagements(self) -> tuple[DailyEngagement, ...]:
        return tuple(a.engagement for a in self.agents)

    def to_dict(self) -> dict[str, Any]:
        p = self.perception
        return {
            "day": self.day,
            "date": self.date.isoformat(),
            "perception": {
                "day": p.day,
                "event_summary": p.event_summary,
                "domain": p.domain.value,
                "country": p.country,
                "event_counters": list(p.event_counters),
                "heat": p.heat,
                "sentiment": p.sentiment.value,
            },
            "agents": [a.to_dict() for a in self.agents],
        }


@dataclass(frozen=True)
class SimulationTrace:
    """Everything one seeded run produced.

    A complete trace has exactly ``horizon_days`` day records, each with one
    row per agent. An incomplete trace keeps the days that finished and
    names the failure.
    """

    scenario_id: str
    seed: int
    layer: int
    horizon_days: int
    country: str
    domain: Domain
    start_date: date
    agents: tuple[GroupAgent, ...]
    days: tuple[DayRecord, ...]
    final_state: EventState
    complete: bool = True
    failure: Optional[str] = None
    outcome: Optional[OutcomeSummary] = None
    schema_version: int = TRACE_SCHEMA_VERSION

    @property
    def daily_totals(self) -> tuple[DailyEngagement, ...]:
        return self.final_state.history

    def series(self, action: str = "views") -> list[int]:
        return [int(getattr(d, action)) for d in self.daily_totals]

    def totals(self) -> dict[str, int]:
        return {name: int(getattr(self.final_state, name)) for name in ACTION_FIELDS}

    def engagement_rows(self) -> list[dict[str, Any]]:
        return engagement_rows(self.scenario_id, [d.engagements for d in self.days])

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "scenario_id": self.scenario_id,
            "seed": self.seed,
            "layer": self.layer,
            "horizon_days": self.horizon_days,
            "country": self.country,
            "domain": self.domain.value,
            "start_date": self.start_date.isoformat(),
            "complete": self.complete,
            "failure": self.failure,
            "agents": [a.to_dict() for a in self.agents],
            "days": [d.to_dict() for d in self.days],
            "final_state": self.final_state.to_dict(),
            "totals": self.totals(),
            "outcome": self.outcome.to_dict() if self.outcome else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SimulationTrace":
        """Rebuild a trace from :meth:`to_dict` output."""
        version = data.get("schema_version")
        if version != TRACE_SCHEMA_VERSION:
            raise ValidationError(
                f"Unsupported trace schema version: {version}", operation="load_trace"
            )
        try:
            return _trace_from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"Malformed trace: {exc}", operation="load_trace") from exc


def _engagement_from_dict(data: Mapping[str, Any]) -> DailyEngagement:
    return DailyEngagement(
        date=date.fromisoformat(data["date"]),
        views=int(data["views"]),
        likes=int(data["likes"]),
        comments=int(data["comments"]),
        shares=int(data["shares"]),
        agent_id=str(data.get("agent_id", "")),
    )


def _state_from_dict(data: Mapping[str, Any]) -> AgentState:
    prediction = data.get("prediction")
    return AgentState(
        emotions=EmotionState.from_dict(data["emotions"]),
        day=int(data["day"]),
        last_action=ActionKind(data["last_action"]) if data.get("last_action") else None,
        prediction=(
            Prediction(prediction["option"], float(prediction["confidence"]))
            if prediction
            else None
        ),
    )


def _trace_from_dict(data: Mapping[str, Any]) -> SimulationTrace:
    agents = tuple(
        GroupAgent(
            id=a["id"],
            name=a["name"],
            country=a["country"],
            population=int(a["population"]),
            characteristic=Characteristic(a["characteristic"]),
            description=a["description"],
        )
        for a in data["agents"]
    )
    days = []
    for d in data["days"]:
        p = d["perception"]
        perception = Perception(
            day=int(p["day"]),
            event_summary=p["event_summary"],
            domain=Domain(p["domain"]),
            country=p["country"],
            event_counters=tuple(int(c) for c in p["event_counters"]),  # type: ignore[arg-type]
            heat=float(p["heat"]),
            sentiment=Sentiment(p["sentiment"]),
        )
        records = tuple(
            AgentDayRecord(
                agent_id=r["agent_id"],
                state=_state_from_dict(r["state"]),
                decision=ActionDecision(
                    action=ActionKind(r["decision"]["action"]),
                    reason=r["decision"].get("reason", ""),
                    plan=tuple(r["decision"].get("plan", ())),
                ),
                engagement=_engagement_from_dict(r["engagement"]),
                memory_size=int(r.get("memory_size", 0)),
                memory_text=r.get("memory", ""),
            )
            for r in d["agents"]
        )
        days.append(DayRecord(int(d["day"]), date.fromisoformat(d["date"]), perception, records))

    fs = data["final_state"]
    final_state = EventState(
        day=int(fs["day"]),
        views=int(fs["views"]),
        likes=int(fs["likes"]),
        comments=int(fs["comments"]),
        shares=int(fs["shares"]),
        history=tuple(_engagement_from_dict(h) for h in fs["history"]),
    )
    outcome = data.get("outcome")
    return SimulationTrace(
        scenario_id=data["scenario_id"],
        seed=int(data["seed"]),
        layer=int(data["layer"]),
        horizon_days=int(data["horizon_days"]),
        country=data["country"],
        domain=Domain(data["domain"]),
        start_date=date.fromisoformat(data["start_date"]),
        agents=agents,
        days=tuple(days),
        final_state=final_state,
        complete=bool(data["complete"]),
        failure=data.get("failure"),
        outcome=(
            OutcomeSummary(
                support=outcome["support"],
                winner=outcome["winner"],
                voters=int(outcome.get("voters", 0)),
                seats=outcome.get("seats", {}),
            )
            if outcome
            else None
        ),
    )


# =============================================================================
# Replications
# =============================================================================


@dataclass(frozen=True)
class ReplicationSet:
    """Traces of one scenario under distinct seeds plus their Z-scores."""

    scenario_id: str
    traces: tuple[SimulationTrace, ...]
    totals: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    summary: Mapping[str, ZScoreReport] = field(default_factory=dict)

    @property
    def seeds(self) -> list[int]:
        return [t.seed for t in self.traces]

    @property
    def complete(self) -> bool:
        return all(t.complete for t in self.traces)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": TRACE_SCHEMA_VERSION,
            "scenario_id": self.scenario_id,
            "seeds": self.seeds,
            "complete": self.complete,
            "totals": {k: list(v) for k, v in self.totals.items()},
            "summary": {k: v.to_dict() for k, v in self.summary.items()},
            "traces": [t.to_dict() for t in self.traces],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def summarize_replications(
    traces: Sequence[SimulationTrace],
    *,
    reference: Optional[Mapping[str, float]] = None,
    tolerance: Optional[float] = None,
) -> tuple[dict[str, tuple[int, ...]], dict[str, ZScoreReport]]:
    """Per-action totals per seed and their Z-scores.

    With ``reference`` (totals of a jitter-free run) each replicate is scored
    against it on the scale ``tolerance * reference``. Without it the
    reference is the replicates' median and the scale their sample std.

    Only complete traces enter the Z-scores; with fewer than two the summary
    is empty.
    """
    complete = [t for t in traces if t.complete]
    totals = {name: tuple(t.totals()[name] for t in complete) for name in ACTION_FIELDS}
    if len(complete) < 2:
        log.warning("Fewer than two complete replicates; no Z-scores computed")
        return totals, {}
    if reference is None:
        return totals, {
            name: reproducibility_z(values, float(np.median(values)))
            for name, values in totals.items()
        }
    return totals, {
        name: reproducibility_z(values, float(reference[name]), tolerance=tolerance)
        for name, values in totals.items()
    }


# =============================================================================
# Runtime
# =============================================================================


@dataclass(frozen=True)
class _RunContext:
    scenario: Scenario
    seed: int
    domain: Domain
    country: str
    weights: Mapping[str, float]
    reasoning: ReasoningEngine
    actions: ActionEngine


class SimulationRuntime:
    """Runs scenarios against one knowledge graph and one oracle gateway.

    Usage:
        runtime = SimulationRuntime(load_bundled_graph(), gateway, cfg)
        trace = runtime.run(Scenario(event, layer=3), seed=0)
    """

    def __init__(
        self,
        graph: KnowledgeGraph,
        gateway: OracleGateway,
        config: RunConfig,
        *,
        workers: Optional[int] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.graph = graph
        self.gateway = gateway
        self.config = config
        self.workers = workers or config["workers"]
        self.log = logger or log
        self._ledger = get_run_ledger()

    # -------------------------------------------------------------------------
    # Setup
    # -------------------------------------------------------------------------

    def prepare(self, scenario: Scenario) -> tuple[Domain, str, TreeSource]:
        """Classify the event and make sure its group tree is cached.

        Returns the domain, country and an immutable snapshot of the graph.
        """
        domain, country = self.gateway.classify_event(scenario.event)
        ensure_tree(self.graph, country, domain, self.gateway)
        return domain, country, self.graph.snapshot()

    def _perception_settings(self, scenario: Scenario) -> PerceptionSettings:
        settings = PerceptionSettings(**self.config["perception"])
        if scenario.heat_schedule:
            settings["heat_schedule"] = scenario.heat_schedule
        if scenario.sentiment:
            settings["sentiment"] = scenario.sentiment.value
        return settings

    def _context(
        self,
        scenario: Scenario,
        seed: int,
        domain: Domain,
        country: str,
        agents: Sequence[GroupAgent],
    ) -> _RunContext:
        cfg = self.config
        reasoning = ReasoningEngine(
            self.gateway,
            cfg["fading"],
            self._perception_settings(scenario),
            use_memory=cfg["use_memory"],
            use_state=cfg["use_state"],
        )
        actions = ActionEngine(
            self.gateway,
            forgetting_p=cfg["fading"].forgetting_p,
            heated=scenario.heated or cfg["engagement"]["heated"],
            strict=cfg["engagement"]["strict"],
        )
        return _RunContext(
            scenario=scenario,
            seed=seed,
            domain=domain,
            country=country,
            weights=compute_population_weights(agents),
            reasoning=reasoning,
            actions=actions,
        )

    # -------------------------------------------------------------------------
    # Day tick
    # -------------------------------------------------------------------------

    def _advance(
        self, ctx: _RunContext, agent: GroupAgent, perception: Perception
    ) -> tuple[GroupAgent, AgentDayRecord]:
        reasoning = ctx.reasoning
        start = ctx.scenario.event.start_date
        view = reasoning.view(agent, perception, start, ctx.seed)
        state = reasoning.feel(view)
        view = replace(view, state=state)
        decision = reasoning.decide(view, ENGAGEMENT_ACTIONS)
        engagement = ctx.actions.engage(view, ctx.weights[agent.id], decision.action)
        memory = reasoning.remember(
            agent.memory,
            decision,
            perception,
            agent_rng(ctx.seed, agent.id, perception.day),
            emotions=state.emotions,
            outcome=engagement,
        )
        state = replace(state, last_action=decision.action)
        record = AgentDayRecord(
            agent_id=agent.id,
            state=state,
            decision=decision,
            engagement=engagement,
            memory_size=len(memory),
            memory_text=memory.to_text(),
        )
        return agent.evolve(state, memory), record

    def step_day(
        self,
        ctx: _RunContext,
        agents: Sequence[GroupAgent],
        event_state: EventState,
        day: int,
        pool: Optional[ThreadPoolExecutor] = None,
    ) -> tuple[list[GroupAgent], EventState, DayRecord]:
        """Advance every agent by one day and aggregate once.

        Raises:
            OracleError: If any agent's oracle exchange fails.
        """
        perception = ctx.reasoning.perceive(
            event_state, ctx.scenario.event, day, domain=ctx.domain, country=ctx.country
        )

        def advance(agent: GroupAgent) -> tuple[GroupAgent, AgentDayRecord]:
            return self._advance(ctx, agent, perception)

        if pool is None:
            results = [advance(a) for a in agents]
        else:
            results = list(pool.map(advance, agents))

        new_agents = [r[0] for r in results]
        records = tuple(r[1] for r in results)
        new_state = ctx.actions.aggregate(event_state, [r.engagement for r in records])
        if new_state.history:
            event_date = new_state.history[-1].date
        else:
            event_date = ctx.scenario.event.start_date + timedelta(days=day - 1)
        return new_agents, new_state, DayRecord(day, event_date, perception, records)

    def predict_round(
        self, ctx: _RunContext, agents: Sequence[GroupAgent], event_state: EventState
    ) -> tuple[list[GroupAgent], OutcomeSummary]:
        """Ask every agent for a prediction after the last day.

        The predict reply is the agent's decision for the round: one oracle
        exchange per agent, stored in memory like a daily decision.
        """
        scenario = ctx.scenario
        day = scenario.horizon_days + 1
        perception = ctx.reasoning.perceive(
            event_state, scenario.event, day, domain=ctx.domain, country=ctx.country
        )
        updated = []
        for agent in agents:
            view = ctx.reasoning.view(agent, perception, scenario.event.start_date, ctx.seed)
            prediction = self.gateway.query_prediction(view, scenario.options)
            decision = ActionDecision(
                ActionKind.PREDICT,
                reason=f"predicts {prediction.option}",
                plan=(ActionKind.PREDICT.value,),
                prediction=prediction.option,
                confidence=prediction.confidence,
            )
            memory = ctx.reasoning.remember(
                agent.memory,
                decision,
                perception,
                agent_rng(ctx.seed, agent.id, day),
                emotions=agent.state.emotions,
            )
            state = replace(agent.state, prediction=prediction, last_action=ActionKind.PREDICT)
            updated.append(agent.evolve(state, memory))

        outcome = ctx.actions.outcome(
            updated, [a.state for a in updated], scenario.options, ctx.weights
        )
        if scenario.seats:
            seats = tally_seats(
                updated, [a.state for a in updated], scenario.seats, scenario.options
            )
            outcome = replace(outcome, seats=seats)
        return updated, outcome

    # -------------------------------------------------------------------------
    # Runs
    # -------------------------------------------------------------------------

    def run(
        self,
        scenario: Scenario,
        seed: int,
        *,
        prepared: Optional[tuple[Domain, str, TreeSource]] = None,
    ) -> SimulationTrace:
        """Simulate ``scenario`` for its horizon with one seed.

        Oracle failures after the first day stop the run and yield an
        incomplete trace instead of raising.

        Raises:
            MissingEntry: No group tree for the event and none obtainable.
            LayerOutOfRange: Scenario layer deeper than the tree.
        """
        started = time.perf_counter()
        with LogContext("run_simulation", self.log, scenario=scenario.id, seed=seed):
            domain, country, source = prepared or self.prepare(scenario)
            specs = retrieve_layer(source, country, domain, scenario.layer)
            agents = instantiate_agents(
                specs,
                country,
                self.gateway,
                memory_capacity=self.config["fading"].memory_capacity,
            )
            initial = tuple(agents)
            ctx = self._context(scenario, seed, domain, country, agents)

            event_state = EventState()
            days: list[DayRecord] = []
            failure: Optional[str] = None
            outcome: Optional[OutcomeSummary] = None

            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                for day in range(1, scenario.horizon_days + 1):
                    try:
                        agents, event_state, record = self.step_day(
                            ctx, agents, event_state, day, pool if self.workers > 1 else None
                        )
                    except (OracleError, SimulationError) as exc:
                        failure = f"day {day}: {exc}"
                        self.log.error(
                            "Run %s seed %d stopped on day %d: %s", scenario.id, seed, day, exc
                        )
                        break
                    days.append(record)

            if failure is None and scenario.options:
                try:
                    agents, outcome = self.predict_round(ctx, agents, event_state)
                except OracleError as exc:
                    failure = f"predict: {exc}"
                    self.log.error("Prediction round failed for %s: %s", scenario.id, exc)

            trace = SimulationTrace(
                scenario_id=scenario.id,
                seed=seed,
                layer=scenario.layer,
                horizon_days=scenario.horizon_days,
                country=country,
                domain=domain,
                start_date=scenario.event.start_date,
                agents=initial,
                days=tuple(days),
                final_state=event_state,
                complete=failure is None,
                failure=failure,
                outcome=outcome,
            )

        self._ledger.record(
            "run_simulation",
            scenario=scenario.id,
            seed=seed,
            country=country,
            domain=domain.value,
            details={"agents": len(initial), "days": len(days), "views": event_state.views},
            success=trace.complete,
            error=failure,
            duration_ms=(time.perf_counter() - started) * 1000,
        )
        return trace

    def nominal_totals(
        self,
        scenario: Scenario,
        seed: int,
        prepared: Optional[tuple[Domain, str, TreeSource]] = None,
    ) -> Optional[dict[str, int]]:
        """Action totals of the oracle's jitter-free twin, if it has one.

        None when the oracle has no twin, declares no jitter bound, or the
        twin's run stops early.
        """
        twin = self.gateway.nominal()
        if twin is None or self.gateway.jitter_bound <= 0:
            return None
        runtime = SimulationRuntime(
            self.graph, twin, self.config, workers=self.workers, logger=self.log
        )
        trace = runtime.run(scenario, seed, prepared=prepared)
        if not trace.complete:
            self.log.warning("Nominal run of %s stopped early: %s", scenario.id, trace.failure)
            return None
        return trace.totals()

    def replicate(
        self, scenario: Scenario, seeds: Sequence[int], *, progress: bool = False
    ) -> ReplicationSet:
        """Run ``scenario`` once per seed, in parallel, and summarise.

        Z-scores use the jitter-free run as reference and the oracle's jitter
        bound as tolerance when the oracle provides both; otherwise the
        replicates' median and sample std.

        Raises:
            DuplicateSeed: A seed is listed twice.
            TooFewReplicates: Fewer than two seeds.
        """
        seed_list = validate_seed_list(seeds, min_count=2)
        prepared = self.prepare(scenario)

        def run_one(seed: int) -> SimulationTrace:
            return self.run(scenario, seed, prepared=prepared)

        with LogContext(
            "run_replications", self.log, scenario=scenario.id, replicates=len(seed_list)
        ):
            with ThreadPoolExecutor(max_workers=min(len(seed_list), self.workers)) as pool:
                traces = tuple(
                    tqdm(
                        pool.map(run_one, seed_list),
                        total=len(seed_list),
                        desc=f"replicate {scenario.id}",
                        unit="run",
                        disable=not progress,
                    )
                )
            reference = self.nominal_totals(scenario, seed_list[0], prepared)
            totals, summary = summarize_replications(
                traces, reference=reference, tolerance=self.gateway.jitter_bound
            )
            replication = ReplicationSet(scenario.id, traces, totals, summary)

        views = summary.get("views")
        self._ledger.record(
            "run_replications",
            scenario=scenario.id,
            details={
                "seeds": seed_list,
                "z_mean_views": views.z_mean if views else None,
                "max_abs_z_views": views.max_abs if views else None,
                "label": views.label if views else None,
            },
            success=replication.complete,
        )
        return replication


def run_simulation(
    scenario: Scenario,
    config: RunConfig,
    gateway: OracleGateway,
    seed: int,
    graph: KnowledgeGraph,
) -> SimulationTrace:
    return SimulationRuntime(graph, gateway, config).run(scenario, seed)


def run_replications(
    scenario: Scenario,
    config: RunConfig,
    gateway: OracleGateway,
    seeds: Sequence[int],
    graph: KnowledgeGraph,
    *,
    progress: bool = False,
) -> ReplicationSet:
    return SimulationRuntime(graph, gateway, config).replicate(scenario, seeds, progress=progress)
