"""Group-agent instantiation."""

from __future__ import annotations

from typing import TYPE_CHECKING, Optional, Sequence

from ..core.exceptions import DuplicateGroup, ValidationError
from ..core.logging import get_logger
from ..core.models import (
    AgentState,
    Characteristic,
    EmotionState,
    GroupAgent,
    GroupSpec,
    Memory,
    agent_id_for,
)
from ..core.validation import validate_country_code
from ..oracle.stub import characteristic_for_group

if TYPE_CHECKING:
    from ..oracle.gateway import OracleGateway

log = get_logger(__name__)

DESCRIPTION_TEMPLATE = (
    "Representing {number} {country} {group}, reflecting their emotions, attitudes, "
    "and possible actions in response to the news."
)


def describe_group(spec: GroupSpec, country: str) -> str:
    return DESCRIPTION_TEMPLATE.format(
        number=f"{spec.population:,}", country=country, group=spec.name
    )


def instantiate_agents(
    specs: Sequence[GroupSpec],
    country: str,
    gateway: Optional["OracleGateway"] = None,
    *,
    memory_capacity: int = 16,
) -> list[GroupAgent]:
    """One agent per spec, in spec order, with zero emotions and empty memory.

    Nothing here is random; the run seed first matters on day one.

    Specs without a characteristic get one from the gateway when given,
    otherwise from the keyword table.

    Raises:
        DuplicateGroup: If two specs share a name.
    """
    if not specs:
        raise ValidationError("No group specs to instantiate", operation="instantiate_agents")
    country = validate_country_code(country)

    seen: set[str] = set()
    for spec in specs:
        if spec.name in seen:
            raise DuplicateGroup(spec.name)
        seen.add(spec.name)

    missing = [s for s in specs if s.characteristic is None]
    assigned: dict[str, Characteristic] = {}
    if missing:
        if gateway is not None:
            assigned = gateway.assign_characteristics(missing, country)
        else:
            assigned = {s.name: characteristic_for_group(s.name) for s in missing}
        log.debug("Assigned characteristics to %d groups", len(assigned))

    agents = []
    for spec in specs:
        characteristic = spec.characteristic or assigned.get(
            spec.name, characteristic_for_group(spec.name)
        )
        agents.append(
            GroupAgent(
                id=agent_id_for(spec.name),
                name=spec.name,
                country=country,
                population=spec.population,
                characteristic=characteristic,
                description=describe_group(spec, country),
                state=AgentState(emotions=EmotionState.zero(), day=0),
                memory=Memory(capacity=memory_capacity),
            )
        )

    log.debug("Instantiated %d agents for %s", len(agents), country)
    return agents
