"""Oracle request/reply types and the oracle protocol."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Protocol

from .templates import TemplateName


@dataclass(frozen=True)
class OracleRequest:
    """One templated question to the oracle.

    ``context`` carries the template's text slots plus any typed values the
    stub reads (extra keys are ignored when rendering).
    """

    template: TemplateName
    context: Mapping[str, Any]
    agent_id: Optional[str] = None
    day: Optional[int] = None
    correlation_id: str = ""


@dataclass(frozen=True)
class OracleReply:
    raw_text: str
    parsed: Any = None
    correlation_id: str = ""
    metadata: Mapping[str, Any] = field(default_factory=dict)


class Oracle(Protocol):
    """Anything that can answer a rendered prompt."""

    name: str

    @property
    def supports_group_search(self) -> bool: ...

    def complete(self, request: OracleRequest, prompt: str) -> str: ...
