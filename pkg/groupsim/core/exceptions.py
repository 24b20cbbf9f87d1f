"""Custom exception hierarchy for groupsim.

This module provides a structured exception hierarchy for simulation runs,
so the CLI can map each failure family onto a distinct exit code and the
operator gets a message naming the offending field, line, or slot.
"""

from __future__ import annotations

from typing import Any, Optional


class GroupSimError(Exception):
    """Base exception for all groupsim errors.

    All groupsim-specific exceptions inherit from this class, allowing
    callers to catch every simulation error with a single except clause.

    Attributes:
        message: Human-readable error description.
        details: Optional dictionary with additional context.
        operation: The operation that was being performed when the error occurred.
    """

    def __init__(
        self,
        message: str,
        *,
        details: Optional[dict[str, Any]] = None,
        operation: Optional[str] = None,
    ) -> None:
        self.message = message
        self.details = details or {}
        self.operation = operation
        super().__init__(self._format_message())

    def _format_message(self) -> str:
        parts = [self.message]
        if self.operation:
            parts.insert(0, f"[{self.operation}]")
        if self.details:
            detail_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            parts.append(f"({detail_str})")
        return " ".join(parts)


# =============================================================================
# Configuration Errors
# =============================================================================


class ConfigurationError(GroupSimError):
    """Error in configuration or environment setup."""

    pass


class MissingCredentialsError(ConfigurationError):
    """Required oracle settings are missing."""

    def __init__(self, missing_vars: list[str]) -> None:
        self.missing_vars = missing_vars
        super().__init__(
            f"Missing required oracle settings: {', '.join(missing_vars)}",
            details={"missing": missing_vars},
            operation="configuration",
        )


class InvalidConfigurationError(ConfigurationError):
    """Configuration value is invalid."""

    def __init__(self, field: str, value: Any, reason: str) -> None:
        self.field = field
        self.value = value
        self.reason = reason
        super().__init__(
            f"Invalid configuration for '{field}': {reason}",
            details={"field": field, "value": str(value)[:100]},
            operation="configuration",
        )


# =============================================================================
# Validation Errors
# =============================================================================


class ValidationError(GroupSimError):
    """Input validation failed."""

    pass


class MalformedEvent(ValidationError):
    """An event record violates the event schema."""

    def __init__(self, field: str, reason: str) -> None:
        self.field = field
        self.reason = reason
        super().__init__(
            f"Malformed event field '{field}': {reason}",
            details={"field": field},
            operation="validate_event",
        )


class InvalidEmotionError(ValidationError):
    """An emotion or attitude channel lies outside [0, 1]."""

    def __init__(self, channel: str, value: Any) -> None:
        self.channel = channel
        self.value = value
        super().__init__(
            f"Emotion channel '{channel}' must lie in [0, 1], got {value}",
            details={"channel": channel},
            operation="validation",
        )


class EmptyPopulation(ValidationError):
    """Population weights cannot be computed for a zero total."""

    def __init__(self, agent_count: int = 0) -> None:
        self.agent_count = agent_count
        super().__init__(
            "Total population is zero",
            details={"agents": agent_count},
            operation="population_weights",
        )


class MalformedTree(ValidationError):
    """A group-tree document does not follow the three-layer grammar."""

    def __init__(self, line: int, reason: str) -> None:
        self.line = line
        self.reason = reason
        super().__init__(
            f"Malformed group tree at line {line}: {reason}",
            details={"line": line},
            operation="parse_group_tree",
        )


class DuplicateGroup(ValidationError):
    """Two group specs share a name."""

    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(
            f"Duplicate group: {name}",
            details={"group": name},
            operation="instantiate_agents",
        )


class LayerOutOfRange(ValidationError):
    """Requested layer is outside 1..depth."""

    def __init__(self, layer: int, depth: int) -> None:
        self.layer = layer
        self.depth = depth
        super().__init__(
            f"Layer {layer} outside 1..{depth}",
            details={"layer": layer, "depth": depth},
            operation="retrieve_layer",
        )


class MixedDates(ValidationError):
    """Engagements from different days were aggregated together."""

    def __init__(self, dates: list[str]) -> None:
        self.dates = dates
        super().__init__(
            f"Engagements span several dates: {', '.join(dates)}",
            details={"dates": dates},
            operation="aggregate_event_state",
        )


class NoOptions(ValidationError):
    """A prediction was requested without any option."""

    def __init__(self) -> None:
        super().__init__("Prediction requires at least one option", operation="predict")


class LengthMismatch(ValidationError):
    """Two series that must be paired have different lengths."""

    def __init__(self, left: int, right: int) -> None:
        self.left = left
        self.right = right
        super().__init__(
            f"Series lengths differ: {left} vs {right}",
            details={"left": left, "right": right},
            operation="metrics",
        )


class TooFewPairs(ValidationError):
    """A paired statistic needs at least two pairs."""

    def __init__(self, count: int) -> None:
        self.count = count
        super().__init__(
            f"Paired t-test needs at least 2 pairs, got {count}",
            details={"pairs": count},
            operation="metrics",
        )


class EmptyList(ValidationError):
    """A dispersion was requested over no values."""

    def __init__(self, what: str = "distances") -> None:
        super().__init__(f"No {what} to summarise", operation="metrics")


class AllZeroActual(ValidationError):
    """MAPE is undefined when every actual value is zero."""

    def __init__(self, length: int) -> None:
        self.length = length
        super().__init__(
            "Every actual value is zero; MAPE is undefined",
            details={"length": length},
            operation="metrics",
        )


class TooFewReplicates(ValidationError):
    """Reproducibility needs at least two replicates."""

    def __init__(self, count: int) -> None:
        self.count = count
        super().__init__(
            f"At least 2 replicates required, got {count}",
            details={"replicates": count},
            operation="reproducibility",
        )


class DuplicateSeed(ValidationError):
    """The same seed was listed twice for a replication set."""

    def __init__(self, seed: int) -> None:
        self.seed = seed
        super().__init__(
            f"Seed listed more than once: {seed}",
            details={"seed": seed},
            operation="run_replications",
        )


class InvalidIdentifierError(ValidationError):
    """Country code, agent id or option name is invalid."""

    def __init__(self, identifier_type: str, value: str, reason: str) -> None:
        self.identifier_type = identifier_type
        self.value = value
        super().__init__(
            f"Invalid {identifier_type}: '{value}' - {reason}",
            details={"type": identifier_type, "value": value},
            operation="validation",
        )


class PathValidationError(ValidationError):
    """File or directory path is invalid or inaccessible."""

    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        super().__init__(
            f"Path error for '{path}': {reason}",
            details={"path": path},
            operation="validation",
        )


# =============================================================================
# Resource Errors
# =============================================================================


class ResourceError(GroupSimError):
    """Error with a knowledge-graph resource."""

    pass


class MissingEntry(ResourceError):
    """No group tree is cached for a (country, domain) pair."""

    def __init__(self, country: str, domain: str) -> None:
        self.country = country
        self.domain = domain
        super().__init__(
            f"No group tree for ({country}, {domain})",
            details={"country": country, "domain": domain},
            operation="lookup",
        )


# =============================================================================
# Oracle Errors
# =============================================================================


class OracleError(GroupSimError):
    """Error rendering, dispatching or parsing an oracle exchange."""

    pass


class MissingSlot(OracleError):
    """A prompt template placeholder has no value."""

    def __init__(self, name: str, template: Optional[str] = None) -> None:
        self.name = name
        self.template = template
        details: dict[str, Any] = {"slot": name}
        if template:
            details["template"] = template
        super().__init__(f"Missing prompt slot: {name}", details=details, operation="render")


class OracleUnavailable(OracleError):
    """The oracle could not be reached after all retries."""

    def __init__(
        self,
        endpoint: str,
        attempts: int,
        last_error: Optional[Exception] = None,
    ) -> None:
        self.endpoint = endpoint
        self.attempts = attempts
        self.last_error = last_error
        msg = f"Oracle unavailable after {attempts} attempts"
        if last_error:
            msg += f": {last_error}"
        super().__init__(
            msg,
            details={"endpoint": endpoint, "attempts": attempts},
            operation="oracle",
        )


class UnparseableReply(OracleError):
    """An oracle reply does not follow its template's grammar."""

    def __init__(self, template: str, reason: str, raw_text: str = "") -> None:
        self.template = template
        self.reason = reason
        self.raw_text = raw_text
        super().__init__(
            f"Unparseable {template} reply: {reason}",
            details={"template": template},
            operation="parse_reply",
        )


class IllegalAction(OracleError):
    """The oracle chose an action outside the available set."""

    def __init__(self, name: str, available: Optional[list[str]] = None) -> None:
        self.name = name
        self.available = available or []
        super().__init__(
            f"Illegal action: {name}",
            details={"action": name, "available": ",".join(self.available)},
            operation="decision",
        )


class NegativeCount(OracleError):
    """An engagement reply carries a negative count."""

    def __init__(self, field: str, value: int) -> None:
        self.field = field
        self.value = value
        super().__init__(
            f"Negative {field} count: {value}",
            details={"field": field, "value": value},
            operation="parse_reply",
        )


# =============================================================================
# Simulation Errors
# =============================================================================


class SimulationError(GroupSimError):
    """Error while stepping a simulation."""

    pass


class ScalingOverflow(SimulationError):
    """The oracle predicted more views than the group has members."""

    def __init__(self, agent_id: str, views: int, population: int) -> None:
        self.agent_id = agent_id
        self.views = views
        self.population = population
        super().__init__(
            f"Views {views} exceed population {population}",
            details={"agent": agent_id},
            operation="generate_engagement",
        )


# =============================================================================
# Artefact Errors
# =============================================================================


class ArtifactIOError(GroupSimError):
    """Reading or writing an input/output artefact failed."""

    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(
            f"I/O error for '{path}': {reason}",
            details={"path": path},
            operation="io",
        )
