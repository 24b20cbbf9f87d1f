"""Deterministic rule-based oracle.

Answers every template in the same reply grammar a remote model is asked
for, so the gateway parses stub and remote replies with the same code. The
reply is a pure function of (template, context, seed).
"""

from __future__ import annotations

import logging
from datetime import date
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np

from ..config import DEFAULT_STUB, StubSettings
from ..core.exceptions import OracleError
from ..core.logging import get_logger
from ..core.models import (
    CHANNELS,
    ActionDecision,
    ActionKind,
    Characteristic,
    DailyEngagement,
    EmotionState,
    Sentiment,
)
from ..core.seeding import derive_seed, unit_jitter
from .base import OracleRequest
from .replies import format_decision, format_emotions, format_engagement
from .templates import TemplateName

# Per-channel push direction (happiness, sadness, anger, optimism, pessimism).
SENTIMENT_DIRECTION: dict[Sentiment, tuple[float, ...]] = {
    Sentiment.NEGATIVE: (-0.5, 1.0, 1.0, -0.5, 1.0),
    Sentiment.POSITIVE: (1.0, -0.5, -0.5, 1.0, -0.5),
    Sentiment.MIXED: (0.5, 0.5, 0.5, 0.25, 0.25),
}

_KEYWORDS: tuple[tuple[Characteristic, tuple[str, ...]], ...] = (
    (
        Characteristic.SUSCEPTIBLE,
        (
            "student",
            "undergraduate",
            "bachelor",
            "vocation",
            "normal",
            "short-cycle",
            "youth",
            "fans",
        ),
    ),
    (
        Characteristic.CALM,
        ("teacher", "doctor", "researcher", "retiree", "professor", "personnel", "mentor"),
    ),
)

# Plan entries in the order the stub prefers them as today's action.
_ACTION_PREFERENCE = (ActionKind.COMMENT, ActionKind.SHARE, ActionKind.LIKE, ActionKind.VIEW)


def characteristic_for_group(name: str) -> Characteristic:
    """Keyword lookup used when neither the document nor an oracle names one."""
    lowered = name.lower()
    for characteristic, words in _KEYWORDS:
        if any(word in lowered for word in words):
            return characteristic
    return Characteristic.ORDINARY


def _emotions(context: Mapping[str, Any], key: str) -> EmotionState:
    value = context.get(key)
    return value if isinstance(value, EmotionState) else EmotionState.zero()


class StubOracle:
    """Rule-based oracle with bounded hash jitter.

    Args:
        seed: Base seed mixed into every jitter draw.
        settings: Stub coefficients (defaults from config).
    """

    name = "stub"

    def __init__(
        self,
        seed: int = 0,
        settings: Optional[StubSettings] = None,
        *,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        self.seed = int(seed)
        self.settings: StubSettings = settings or StubSettings(**DEFAULT_STUB)
        self.log = logger or get_logger(__name__)
        self._handlers: dict[TemplateName, Callable[[OracleRequest], str]] = {
            TemplateName.CLASSIFY: self._classify,
            TemplateName.EMOTION_UPDATE: self._emotion_update,
            TemplateName.DECISION: self._decision,
            TemplateName.ENGAGEMENT_PREDICT: self._engagement,
            TemplateName.PREDICT: self._predict,
            TemplateName.GROUP_GENERATE: self._group_generate,
        }

    @property
    def supports_group_search(self) -> bool:
        return False

    @property
    def jitter_bound(self) -> float:
        """Relative bound on the engagement jitter."""
        return float(self.settings["engagement_jitter"])

    def nominal(self) -> "StubOracle":
        """Twin with both jitter bounds at zero."""
        settings = StubSettings(**self.settings)
        settings["emotion_jitter"] = 0.0
        settings["engagement_jitter"] = 0.0
        return StubOracle(self.seed, settings, logger=self.log)

    def complete(self, request: OracleRequest, prompt: str) -> str:
        handler = self._handlers.get(request.template)
        if handler is None:
            raise OracleError(
                f"Stub oracle cannot answer {request.template.value}",
                details={"template": request.template.value},
                operation="stub",
            )
        return handler(request)

    # -------------------------------------------------------------------------
    # Helpers
    # -------------------------------------------------------------------------

    def _jitter(self, request: OracleRequest, *salt: Any) -> float:
        run_seed = int(request.context.get("run_seed", 0))
        return unit_jitter(self.seed, run_seed, request.agent_id or "", request.day or 0, *salt)

    # -------------------------------------------------------------------------
    # Templates
    # -------------------------------------------------------------------------

    def _classify(self, request: OracleRequest) -> str:
        ctx = request.context
        return f"Domain: {ctx['event_domain']}\nCountry: {ctx['event_country']}"

    def _emotion_update(self, request: OracleRequest) -> str:
        """Raw emotions: prev + heat x decay x gain x (direction + jitter).

        No characteristic scaling here; the reasoning engine applies the
        amplitude to stub and remote replies alike.
        """
        ctx = request.context
        s = self.settings
        prev = _emotions(ctx, "prev_emotions")
        day = int(ctx.get("day_number", request.day or 1))
        heat = float(ctx.get("heat", 0.0))
        sentiment = Sentiment(ctx.get("sentiment", Sentiment.NEGATIVE))

        direction = np.array(SENTIMENT_DIRECTION[sentiment], dtype=float)
        jitter = np.array([self._jitter(request, "emotion", c) for c in CHANNELS], dtype=float)
        magnitude = heat * s["decay_base"] ** max(day - 1, 0) * s["emotion_gain"]
        raw = prev.as_vector() + magnitude * (direction + s["emotion_jitter"] * jitter)
        return format_emotions(EmotionState.from_vector(raw))

    def _decision(self, request: OracleRequest) -> str:
        ctx = request.context
        available: Sequence[ActionKind] = tuple(ctx.get("available_kinds") or ())
        emotions = _emotions(ctx, "current_emotions")
        day = int(ctx.get("day_number", request.day or 1))

        if len(available) == 1:
            action = available[0]
            decision = ActionDecision(action, "only available action", (action.value,))
            return format_decision(decision)
        if day <= 1:
            decision = ActionDecision(ActionKind.VIEW, "first exposure", (ActionKind.VIEW.value,))
            return format_decision(decision)

        plan = [ActionKind.VIEW]
        if emotions.happiness >= 0.3 or emotions.optimism >= 0.5:
            plan.append(ActionKind.LIKE)
        if emotions.anger >= 0.6:
            plan.append(ActionKind.COMMENT)
        if emotions.intensity >= 0.5:
            plan.append(ActionKind.SHARE)

        action = next(
            (a for a in _ACTION_PREFERENCE if a in plan and a in available),
            available[0] if available else ActionKind.VIEW,
        )
        reason = f"intensity {emotions.intensity:.2f}, lean {emotions.lean:+.2f}"
        return format_decision(ActionDecision(action, reason, tuple(a.value for a in plan)))

    def _engagement(self, request: OracleRequest) -> str:
        ctx = request.context
        s = self.settings
        population = int(ctx.get("population_n", 0))
        day = int(ctx.get("day_number", request.day or 1))
        event_date = ctx.get("event_date")
        if not isinstance(event_date, date):
            event_date = date.fromisoformat(str(ctx["date"]))

        if population <= 0:
            return format_engagement(DailyEngagement(date=event_date))

        heat = float(ctx.get("heat", 0.0))
        forgetting_p = float(ctx.get("forgetting_p", 0.0))
        weight = float(ctx.get("weight", 0.0))
        intensity = _emotions(ctx, "current_emotions").intensity
        heated = bool(ctx.get("heated", False))
        action = ctx.get("action")

        attention = (1.0 - forgetting_p) ** ((day - 1) / 2.0)
        u = self._jitter(request, "views")
        raw_views = (
            population
            * s["base_view_rate"]
            * heat
            * attention
            * (1.0 + s["intensity_gain"] * intensity)
            * (1.0 + s["visibility"] * weight)
            * (1.0 + s["engagement_jitter"] * u)
        )
        views = min(int(round(raw_views)), population)
        like_cap = views // 10
        likes = min(int(views * s["like_rate"]), like_cap)
        comments = int(likes * s["comment_ratio"])
        shares = int(likes * s["share_ratio"])

        boost = s["action_boost"]
        if action == ActionKind.LIKE:
            likes = min(int(likes * boost), like_cap)
        elif action == ActionKind.COMMENT:
            comments = int(comments * boost)
        elif action == ActionKind.SHARE:
            shares = int(shares * boost)
        if not heated:
            comments = min(comments, likes)
            shares = min(shares, likes)

        return format_engagement(
            DailyEngagement(
                date=event_date, views=views, likes=likes, comments=comments, shares=shares
            )
        )

    def _predict(self, request: OracleRequest) -> str:
        ctx = request.context
        options: Sequence[str] = list(ctx.get("option_list") or ())
        if not options:
            raise OracleError("No options to predict", operation="stub")
        lean = _emotions(ctx, "current_emotions").lean
        if abs(lean) < 0.1:
            run_seed = int(ctx.get("run_seed", 0))
            salt = derive_seed(self.seed, run_seed, request.agent_id or "", "predict")
            index = salt % len(options)
        else:
            index = 0 if lean > 0 else len(options) - 1
        confidence = min(1.0, 0.5 + abs(lean) / 2.0)
        return (
            f"Prediction: {options[index]}\n"
            f"Confidence: {confidence:.4f}\n"
            f"Reason: attitude lean {lean:+.2f}"
        )

    def _group_generate(self, request: OracleRequest) -> str:
        ctx = request.context
        country = ctx.get("country", "")
        blocks = []
        for n, group in enumerate(ctx.get("group_names") or (), start=1):
            blocks.append(
                f"agent {n}:\n"
                f"  id: {group}-agents\n"
                f"  description: Representing {country} {group}.\n"
                f"  characteristic: {characteristic_for_group(group).value} population"
            )
        return "\n".join(blocks)
