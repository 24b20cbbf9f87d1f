"""Reply grammars.

Each parser accepts prose around its block but not a malformed block, and
never fills in a missing numeric field.
"""

from __future__ import annotations

import re
from datetime import date
from typing import Collection, Optional, Sequence

from ..core.exceptions import (
    IllegalAction,
    InvalidIdentifierError,
    NegativeCount,
    UnparseableReply,
)
from ..core.models import (
    ACTION_FIELDS,
    ATTITUDE_CHANNELS,
    CHANNELS,
    EMOTION_CHANNELS,
    ActionDecision,
    ActionKind,
    Characteristic,
    DailyEngagement,
    Domain,
    EmotionState,
    Prediction,
)
from ..core.validation import validate_country_code


_NUM = r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"


def _line(label: str) -> re.Pattern[str]:
    # Tolerates list bullets and markdown bold around the label.
    return re.compile(
        rf"^[ \t>*-]*\**\s*{label}\s*\**\s*:\s*\**\s*(?P<value>.*?)\s*\**\s*$",
        re.IGNORECASE | re.MULTILINE,
    )


_DOMAIN_LINE = _line("Domain")
_COUNTRY_LINE = _line("Country")
_ACTION_LINE = _line("Action")
_REASON_LINE = _line("Reason")
_PREDICTION_LINE = _line("Prediction")
_CONFIDENCE_LINE = _line("Confidence")
_DATE_LINE = _line("Date")
_PLAN_BLOCK = re.compile(r"Updated plan\s*:(?P<plan>.*)\Z", re.IGNORECASE | re.DOTALL)
_PLAN_ITEM = re.compile(r"\d+\.\s*([A-Za-z_-]+)")
_COUNT_LINES = {name: _line(name.capitalize()) for name in ACTION_FIELDS}
_COUNT_VALUE = re.compile(r"^[-+]?\d[\d,_]*$")

_BLOCK = {
    "emotions": re.compile(r"emotions\s*:\s*\{(?P<body>[^}]*)\}", re.IGNORECASE),
    "attitudes": re.compile(r"attitudes\s*:\s*\{(?P<body>[^}]*)\}", re.IGNORECASE),
}
_ENTRY = re.compile(
    rf"""['"]?(?P<name>[A-Za-z_]+)['"]?\s*:\s*\(?\s*['"]?(?P<value>{_NUM})['"]?\s*\)?"""
)


# =============================================================================
# classify
# =============================================================================


def parse_classification(text: str) -> tuple[Domain, str]:
    domain_match = _DOMAIN_LINE.search(text)
    if not domain_match or not domain_match.group("value"):
        raise UnparseableReply("classify", "missing Domain line", text)
    raw_domain = domain_match.group("value").strip().strip(".").lower()
    try:
        domain = Domain(raw_domain)
    except ValueError:
        raise UnparseableReply("classify", f"unknown domain {raw_domain!r}", text)

    country_match = _COUNTRY_LINE.search(text)
    if not country_match or not country_match.group("value"):
        raise UnparseableReply("classify", "missing Country line", text)
    try:
        country = validate_country_code(country_match.group("value").strip().strip("."))
    except InvalidIdentifierError as exc:
        raise UnparseableReply("classify", exc.message, text) from exc
    return domain, country


# =============================================================================
# emotion_update
# =============================================================================


def _block_values(text: str, block: str, channels: Sequence[str]) -> dict[str, float]:
    match = _BLOCK[block].search(text)
    if not match:
        raise UnparseableReply("emotion_update", f"no {block} block", text)

    found = {
        m.group("name").lower(): float(m.group("value"))
        for m in _ENTRY.finditer(match.group("body"))
    }
    values: dict[str, float] = {}
    for channel in channels:
        if channel not in found:
            raise UnparseableReply("emotion_update", f"missing channel {channel!r}", text)
        value = found[channel]
        if not 0.0 <= value <= 1.0:
            raise UnparseableReply(
                "emotion_update", f"{channel}={value} outside [0, 1]", text
            )
        values[channel] = value
    return values


def parse_emotions(text: str) -> EmotionState:
    values = _block_values(text, "emotions", EMOTION_CHANNELS)
    values.update(_block_values(text, "attitudes", ATTITUDE_CHANNELS))
    return EmotionState(**{name: values[name] for name in CHANNELS})


def format_emotions(emotions: EmotionState) -> str:
    """Render emotions in the reply grammar."""
    return f"emotions: {emotions.emotions_text()}\nattitudes: {emotions.attitudes_text()}"


# =============================================================================
# decision
# =============================================================================


def _confidence(text: str, template: str) -> Optional[float]:
    match = _CONFIDENCE_LINE.search(text)
    if not match:
        return None
    raw = match.group("value").strip().rstrip("%")
    try:
        value = float(raw)
    except ValueError:
        raise UnparseableReply(template, f"confidence {raw!r} is not a number", text)
    if not 0.0 <= value <= 1.0:
        raise UnparseableReply(template, f"confidence {value} outside [0, 1]", text)
    return value


def parse_decision(text: str, available: Collection[ActionKind]) -> ActionDecision:
    """Parse an Action / Reason / Updated plan reply.

    Raises:
        UnparseableReply: If the Action line is missing.
        IllegalAction: If the chosen action is not available.
    """
    match = _ACTION_LINE.search(text)
    if not match or not match.group("value"):
        raise UnparseableReply("decision", "missing Action line", text)

    name = match.group("value").split()[0].strip(".,;").lower()
    allowed = sorted(a.value for a in available)
    if name not in allowed:
        raise IllegalAction(name, allowed)

    reason_match = _REASON_LINE.search(text)
    reason = reason_match.group("value") if reason_match else ""

    plan: tuple[str, ...] = ()
    plan_match = _PLAN_BLOCK.search(text)
    if plan_match:
        plan = tuple(item.lower() for item in _PLAN_ITEM.findall(plan_match.group("plan")))

    prediction_match = _PREDICTION_LINE.search(text)
    return ActionDecision(
        action=ActionKind(name),
        reason=reason,
        plan=plan,
        prediction=prediction_match.group("value") if prediction_match else None,
        confidence=_confidence(text, "decision"),
    )


def format_decision(decision: ActionDecision) -> str:
    plan = " ".join(f"{i}. {name}" for i, name in enumerate(decision.plan, start=1))
    return (
        f"Action: {decision.action.value}\n"
        f"Reason: {decision.reason}\n"
        f"Updated plan: {plan}"
    )


# =============================================================================
# engagement_predict
# =============================================================================


def parse_engagement(text: str, default_date: date, agent_id: str = "") -> DailyEngagement:
    """Parse the Date / Views / Likes / Comments / Shares block.

    Raises:
        UnparseableReply: If a count line is missing or not an integer.
        NegativeCount: If a count is negative.
    """
    counts: dict[str, int] = {}
    for name, pattern in _COUNT_LINES.items():
        match = pattern.search(text)
        if not match:
            raise UnparseableReply(
                "engagement_predict", f"missing {name.capitalize()} line", text
            )
        raw = match.group("value").split()[0] if match.group("value") else ""
        if not _COUNT_VALUE.match(raw):
            raise UnparseableReply(
                "engagement_predict", f"{name} value {raw!r} is not an integer", text
            )
        value = int(raw.replace(",", "").replace("_", ""))
        if value < 0:
            raise NegativeCount(name, value)
        counts[name] = value

    day = default_date
    date_match = _DATE_LINE.search(text)
    if date_match:
        try:
            day = date.fromisoformat(date_match.group("value").strip()[:10])
        except ValueError:
            raise UnparseableReply("engagement_predict", "Date is not YYYY-MM-DD", text)

    return DailyEngagement(date=day, agent_id=agent_id, **counts)


def format_engagement(engagement: DailyEngagement) -> str:
    return (
        f"Date: {engagement.date.isoformat()}\n"
        f"Views: {engagement.views}\n"
        f"Likes: {engagement.likes}\n"
        f"Comments: {engagement.comments}\n"
        f"Shares: {engagement.shares}"
    )


# =============================================================================
# predict
# =============================================================================


def parse_prediction(text: str, options: Sequence[str]) -> Prediction:
    match = _PREDICTION_LINE.search(text)
    if not match or not match.group("value"):
        raise UnparseableReply("predict", "missing Prediction line", text)
    raw = match.group("value").strip().strip(".")
    by_lower = {o.lower(): o for o in options}
    if raw.lower() not in by_lower:
        raise UnparseableReply("predict", f"unknown option {raw!r}", text)

    confidence = _confidence(text, "predict")
    if confidence is None:
        raise UnparseableReply("predict", "missing Confidence line", text)
    return Prediction(option=by_lower[raw.lower()], confidence=confidence)


# =============================================================================
# group_generate
# =============================================================================

_AGENT_ID = re.compile(
    r"^\s*[-*]?\s*id\s*:\s*(?P<group>.+?)-agents\s*$", re.IGNORECASE | re.MULTILINE
)
_CHARACTERISTIC = re.compile(
    r"characteristic\s*:\s*\{?\s*(?P<char>susceptible|ordinary|calm)", re.IGNORECASE
)


def parse_group_generate(text: str) -> dict[str, Characteristic]:
    """Map group name to characteristic from a group-agent listing."""
    matches = list(_AGENT_ID.finditer(text))
    result: dict[str, Characteristic] = {}
    for i, match in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        char_match = _CHARACTERISTIC.search(text, match.end(), end)
        if not char_match:
            raise UnparseableReply(
                "group_generate", f"no characteristic for {match.group('group')!r}", text
            )
        result[match.group("group").strip()] = Characteristic(char_match.group("char").lower())
    if not result:
        raise UnparseableReply("group_generate", "no agent entries", text)
    return result
