"""Oracle gateway: render, dispatch, parse.

The gateway is the only component that talks to an oracle. It bounds the
number of concurrent requests, stamps each one with a correlation id and
turns reply text into typed values.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Any, Callable, Collection, Optional, Sequence, TypeVar

from ..config import RunConfig
from ..core.exceptions import ConfigurationError
from ..core.logging import LogContext, generate_correlation_id, get_logger
from ..core.models import (
    ActionDecision,
    ActionKind,
    AgentState,
    Characteristic,
    DailyEngagement,
    Domain,
    EmotionState,
    EventRecord,
    GroupAgent,
    GroupSpec,
    Memory,
    Perception,
    Prediction,
)
from .base import Oracle, OracleReply, OracleRequest
from .remote import RemoteOracle
from .replies import (
    parse_classification,
    parse_decision,
    parse_emotions,
    parse_engagement,
    parse_group_generate,
    parse_prediction,
)
from .stub import StubOracle
from .templates import TemplateName, render_template

T = TypeVar("T")

DEFAULT_WORLD = "an online social network where news spreads through groups of users"


@dataclass(frozen=True)
class AgentView:
    """Everything an agent-level prompt is rendered from."""

    agent: GroupAgent
    perception: Perception
    state: AgentState
    memory: Memory
    start_date: date
    run_seed: int = 0
    world_description: str = DEFAULT_WORLD

    @property
    def event_date(self) -> date:
        return self.start_date + timedelta(days=self.perception.day - 1)


def agent_context(view: AgentView) -> dict[str, Any]:
    """Header slots shared by the agent templates, plus typed stub inputs."""
    p = view.perception
    return {
        "agent_name": view.agent.id,
        "agent_description": view.agent.description,
        "world_description": view.world_description,
        "day_n": f"Day {p.day} ({view.event_date.isoformat()})",
        "event_state": f"{p.event_summary} | {p.counters_text()} | heat={p.heat:.4f}",
        "memory": view.memory.to_text(),
        "previous_state": (
            f"emotions {view.state.emotions.emotions_text()}, "
            f"attitudes {view.state.emotions.attitudes_text()}"
        ),
        "emotions": view.state.emotions.emotions_text(),
        "attitudes": view.state.emotions.attitudes_text(),
        "run_seed": view.run_seed,
        "day_number": p.day,
        "heat": p.heat,
        "sentiment": p.sentiment,
        "current_emotions": view.state.emotions,
    }


class OracleGateway:
    """Bounded, correlated access to one oracle.

    Usage:
        gateway = OracleGateway(StubOracle(seed=0), max_inflight=8)
        emotions = gateway.query_emotion_update(view, fading_rate=0.25)
    """

    def __init__(
        self,
        oracle: Oracle,
        max_inflight: int = 8,
        *,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.oracle = oracle
        self.max_inflight = max_inflight
        self.log = logger or get_logger(__name__)
        self._slots = threading.BoundedSemaphore(max_inflight)
        self._lock = threading.Lock()
        self.request_count = 0

    @classmethod
    def from_config(cls, cfg: RunConfig, *, seed: int = 0) -> "OracleGateway":
        settings = cfg["oracle"]
        oracle: Oracle
        if settings["mode"] == "remote":
            if not settings["endpoint"]:
                raise ConfigurationError(
                    "Remote oracle needs an endpoint", operation="oracle_gateway"
                )
            oracle = RemoteOracle.from_settings(settings)
        else:
            oracle = StubOracle(seed=seed, settings=cfg["stub"])
        return cls(oracle, max_inflight=settings["max_inflight"])

    @property
    def supports_group_search(self) -> bool:
        return self.oracle.supports_group_search

    @property
    def jitter_bound(self) -> float:
        """Relative engagement jitter of the oracle; 0.0 when it declares none."""
        return float(getattr(self.oracle, "jitter_bound", 0.0))

    def nominal(self) -> Optional["OracleGateway"]:
        """Gateway over the oracle's jitter-free twin, or None without one."""
        twin = getattr(self.oracle, "nominal", None)
        if twin is None:
            return None
        return OracleGateway(twin(), self.max_inflight, logger=self.log)

    # -------------------------------------------------------------------------
    # Dispatch
    # -------------------------------------------------------------------------

    def render_prompt(self, request: OracleRequest) -> str:
        return render_template(request.template, request.context)

    def dispatch(self, request: OracleRequest, parser: Callable[[str], T]) -> OracleReply:
        """Render ``request``, send it, and parse the reply.

        Raises:
            MissingSlot: If the context lacks a template slot.
            OracleError: Propagated from the oracle or the parser.
        """
        cid = request.correlation_id or generate_correlation_id()
        prompt = self.render_prompt(request)
        with self._slots:
            with LogContext(
                f"oracle_{request.template.value}",
                self.log,
                correlation_id=cid,
                log_entry_exit=False,
                agent=request.agent_id,
                day=request.day,
            ):
                text = self.oracle.complete(request, prompt)
                parsed = parser(text)
        with self._lock:
            self.request_count += 1
        return OracleReply(raw_text=text, parsed=parsed, correlation_id=cid)

    def _ask(
        self,
        template: TemplateName,
        context: dict[str, Any],
        parser: Callable[[str], T],
        *,
        agent_id: Optional[str] = None,
        day: Optional[int] = None,
    ) -> T:
        request = OracleRequest(template, context, agent_id=agent_id, day=day)
        reply = self.dispatch(request, parser)
        result: T = reply.parsed
        return result

    # -------------------------------------------------------------------------
    # Event-level queries
    # -------------------------------------------------------------------------

    def classify_event(self, event: EventRecord) -> tuple[Domain, str]:
        context = {
            "title": event.title,
            "content": event.content,
            "platform": event.platform.value,
            "domains": ", ".join(d.value for d in Domain),
            "event_domain": event.domain.value,
            "event_country": event.country,
        }
        return self._ask(TemplateName.CLASSIFY, context, parse_classification)

    def generate_group_document(self, country: str, domain: Domain) -> str:
        """Ask for a group hierarchy document (raw reply text)."""
        request = OracleRequest(
            TemplateName.GROUP_FIND, {"country": country, "domain": domain.value}
        )
        return self.dispatch(request, str).raw_text

    def assign_characteristics(
        self, specs: Sequence[GroupSpec], country: str
    ) -> dict[str, Characteristic]:
        """Characteristic per group name from a group_generate exchange."""
        document = "\n".join(f"- {s.name}: {s.population:,}" for s in specs)
        context = {
            "country": country,
            "document": document,
            "group_names": [s.name for s in specs],
        }
        assigned = self._ask(TemplateName.GROUP_GENERATE, context, parse_group_generate)
        return {s.name: assigned[s.name] for s in specs if s.name in assigned}

    # -------------------------------------------------------------------------
    # Agent-level queries
    # -------------------------------------------------------------------------

    def query_emotion_update(self, view: AgentView, fading_rate: float) -> EmotionState:
        context = agent_context(view)
        context["emotion_fading"] = f"{fading_rate:.2f}"
        context["prev_emotions"] = view.state.emotions
        return self._ask(
            TemplateName.EMOTION_UPDATE,
            context,
            parse_emotions,
            agent_id=view.agent.id,
            day=view.perception.day,
        )

    def query_decision(
        self, view: AgentView, available: Collection[ActionKind]
    ) -> ActionDecision:
        ordered = [a for a in ActionKind if a in available]
        context = agent_context(view)
        context["available_actions"] = ", ".join(a.value for a in ordered)
        context["available_kinds"] = tuple(ordered)
        return self._ask(
            TemplateName.DECISION,
            context,
            lambda text: parse_decision(text, ordered),
            agent_id=view.agent.id,
            day=view.perception.day,
        )

    def query_engagement(
        self,
        view: AgentView,
        *,
        weight: float,
        forgetting_p: float,
        action: Optional[ActionKind] = None,
        heated: bool = False,
    ) -> DailyEngagement:
        event_date = view.event_date
        context = agent_context(view)
        context.update(
            {
                "forgetting_probability": f"{forgetting_p:.2f}",
                "population": f"{view.agent.population:,}",
                "date": event_date.isoformat(),
                "population_n": view.agent.population,
                "forgetting_p": forgetting_p,
                "weight": weight,
                "action": action,
                "heated": heated,
                "event_date": event_date,
            }
        )
        return self._ask(
            TemplateName.ENGAGEMENT_PREDICT,
            context,
            lambda text: parse_engagement(text, event_date, view.agent.id),
            agent_id=view.agent.id,
            day=view.perception.day,
        )

    def query_prediction(self, view: AgentView, options: Sequence[str]) -> Prediction:
        context = agent_context(view)
        context["options"] = ", ".join(options)
        context["option_list"] = list(options)
        return self._ask(
            TemplateName.PREDICT,
            context,
            lambda text: parse_prediction(text, options),
            agent_id=view.agent.id,
            day=view.perception.day,
        )
