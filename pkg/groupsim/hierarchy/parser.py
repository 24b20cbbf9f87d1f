"""Group-tree document grammar.

A document lists population groups on three layers::

    ## Students: 58,030,769 (susceptible)
      1. **Postgraduates: 3,653,613** (calm)
        - Doctor: 556,065 (calm)

The trailing characteristic is optional on every line. Populations may use
"," or "_" as thousands separators.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from ..core.exceptions import MalformedTree
from ..core.logging import get_logger
from ..core.models import Characteristic, Domain, GroupSpec

log = get_logger(__name__)

MAX_DEPTH = 3

_DEEPER = re.compile(r"^#{3,}")
_LAYER1 = re.compile(r"^##\s+(?P<body>.+)$")
_LAYER2 = re.compile(r"^\d+\.\s*\*\*(?P<body>.+?)\*\*\s*(?P<suffix>\(\s*[A-Za-z]+\s*\))?\s*$")
_LAYER3 = re.compile(r"^[-*]\s+(?P<body>.+)$")
_BODY = re.compile(
    r"^(?P<name>[^:]+?)\s*:\s*(?P<number>\S+?)\s*(?:\(\s*(?P<char>[A-Za-z]+)\s*\))?\s*$"
)
_NUMBER = re.compile(r"^\d+(?:[,_]\d+)*$")


@dataclass(frozen=True)
class GroupTree:
    """A (country, domain) multiway tree, nodes kept in document order."""

    country: str
    domain: Domain
    nodes: tuple[GroupSpec, ...]

    @property
    def roots(self) -> list[GroupSpec]:
        return [n for n in self.nodes if n.layer == 1]

    @property
    def depth(self) -> int:
        return max((n.layer for n in self.nodes), default=0)

    @property
    def leaves(self) -> list[GroupSpec]:
        parents = {n.parent for n in self.nodes if n.parent}
        return [n for n in self.nodes if n.name not in parents]

    def children_of(self, name: str) -> list[GroupSpec]:
        return [n for n in self.nodes if n.parent == name]

    def find(self, name: str) -> Optional[GroupSpec]:
        return next((n for n in self.nodes if n.name == name), None)

    def bfs(self) -> Iterator[GroupSpec]:
        """Level by level, siblings in document order."""
        queue: deque[GroupSpec] = deque(self.roots)
        while queue:
            node = queue.popleft()
            yield node
            queue.extend(self.children_of(node.name))


def _parse_body(body: str, line_no: int, suffix: Optional[str] = None) -> GroupSpec:
    if ":" not in body:
        raise MalformedTree(line_no, "missing colon")

    match = _BODY.match(body.strip())
    if not match:
        raise MalformedTree(line_no, f"unparseable group entry {body.strip()!r}")

    number = match.group("number")
    if not _NUMBER.match(number):
        raise MalformedTree(line_no, f"unparseable number {number!r}")

    char_text = match.group("char")
    if suffix:
        char_text = suffix.strip("() \t")
    characteristic: Optional[Characteristic] = None
    if char_text:
        try:
            characteristic = Characteristic(char_text.lower())
        except ValueError:
            raise MalformedTree(line_no, f"unknown characteristic {char_text!r}")

    return GroupSpec(
        name=match.group("name").strip(),
        population=int(number.replace(",", "").replace("_", "")),
        characteristic=characteristic,
        layer=0,
    )


def parse_group_tree(document: str, country: str, domain: Domain) -> GroupTree:
    """Parse a three-layer group document into a GroupTree.

    Raises:
        MalformedTree: On unknown markers, a missing colon, an unparseable
            number, a layer deeper than three, an orphan node or a duplicate
            group name. An empty document fails at line 0.
    """
    nodes: list[GroupSpec] = []
    seen: set[str] = set()
    open_parents: dict[int, str] = {}

    for line_no, raw in enumerate(document.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue

        suffix: Optional[str] = None
        if _DEEPER.match(line):
            raise MalformedTree(line_no, "deeper than three layers")
        if m1 := _LAYER1.match(line):
            layer, body = 1, m1.group("body")
        elif m2 := _LAYER2.match(line):
            layer, body, suffix = 2, m2.group("body"), m2.group("suffix")
        elif m3 := _LAYER3.match(line):
            layer, body = 3, m3.group("body")
        else:
            raise MalformedTree(line_no, "unknown marker")

        spec = _parse_body(body, line_no, suffix)

        parent: Optional[str] = None
        if layer > 1:
            parent = open_parents.get(layer - 1)
            if parent is None:
                raise MalformedTree(
                    line_no, f"layer-{layer} node without a layer-{layer - 1} parent"
                )

        if spec.name in seen:
            raise MalformedTree(line_no, f"duplicate group {spec.name!r}")
        seen.add(spec.name)

        nodes.append(
            GroupSpec(
                name=spec.name,
                population=spec.population,
                characteristic=spec.characteristic,
                layer=layer,
                parent=parent,
            )
        )
        open_parents[layer] = spec.name
        for deeper in range(layer + 1, MAX_DEPTH + 1):
            open_parents.pop(deeper, None)

    if not any(n.layer == 1 for n in nodes):
        raise MalformedTree(0, "no layer-1 node")

    tree = GroupTree(country=country, domain=domain, nodes=tuple(nodes))
    for parent_name, declared, summed in population_discrepancies(tree):
        log.warning(
            "Population of %s (%d) differs from its subgroups (%d) in %s/%s",
            parent_name,
            declared,
            summed,
            country,
            domain.value,
        )
    return tree


def population_discrepancies(tree: GroupTree) -> list[tuple[str, int, int]]:
    """(parent, declared, children sum) for every parent whose total disagrees."""
    result: list[tuple[str, int, int]] = []
    for node in tree.nodes:
        children = tree.children_of(node.name)
        if not children:
            continue
        summed = sum(c.population for c in children)
        if summed != node.population:
            result.append((node.name, node.population, summed))
    return result


def _entry(spec: GroupSpec) -> str:
    return f"{spec.name}: {spec.population:,}"


def _suffix(spec: GroupSpec) -> str:
    return f" ({spec.characteristic.value})" if spec.characteristic else ""


def serialize_group_tree(tree: GroupTree) -> str:
    """Canonical text form; parsing it yields the same tree."""
    lines: list[str] = []
    counters: dict[str, int] = {}
    for node in tree.nodes:
        if node.layer == 1:
            if lines:
                lines.append("")
            lines.append(f"## {_entry(node)}{_suffix(node)}")
        elif node.layer == 2:
            key = node.parent or ""
            counters[key] = counters.get(key, 0) + 1
            lines.append(f"  {counters[key]}. **{_entry(node)}**{_suffix(node)}")
        else:
            lines.append(f"    - {_entry(node)}{_suffix(node)}")
    return "\n".join(lines) + "\n"


_MARKER_LINE = re.compile(r"^\s*(##\s|\d+\.\s*\*\*|[-*]\s)")


def extract_tree_block(text: str) -> str:
    """Keep only the grammar lines of a free-form reply."""
    return "\n".join(line for line in text.splitlines() if _MARKER_LINE.match(line))
