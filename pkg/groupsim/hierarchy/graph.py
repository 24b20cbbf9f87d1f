"""Knowledge graph: cached group trees keyed by (country, domain)."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import TYPE_CHECKING, Mapping, Optional, Protocol, Union

from ..core.exceptions import ArtifactIOError, LayerOutOfRange, MissingEntry
from ..core.logging import get_logger, get_run_ledger
from ..core.models import Domain, GroupSpec
from ..core.validation import validate_country_code
from .parser import GroupTree, extract_tree_block, parse_group_tree, serialize_group_tree

if TYPE_CHECKING:
    from ..oracle.gateway import OracleGateway

log = get_logger(__name__)

GRAPH_SCHEMA_VERSION = 1
INDEX_FILE = "index.json"

GraphKey = tuple[str, str]


def _key(country: str, domain: Union[Domain, str]) -> GraphKey:
    value = domain.value if isinstance(domain, Domain) else str(domain).lower()
    return (country.upper(), value)


class TreeSource(Protocol):
    def get(self, country: str, domain: Union[Domain, str]) -> GroupTree: ...


@dataclass(frozen=True)
class GraphSnapshot:
    """Read-only view of the graph taken at the start of a run."""

    entries: Mapping[GraphKey, GroupTree]

    def get(self, country: str, domain: Union[Domain, str]) -> GroupTree:
        key = _key(country, domain)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingEntry(*key)

    def __len__(self) -> int:
        return len(self.entries)


class KnowledgeGraph:
    """Single-writer cache of group trees and the documents they came from."""

    def __init__(self) -> None:
        self.entries: dict[GraphKey, GroupTree] = {}
        self.source_documents: dict[GraphKey, str] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key: object) -> bool:
        return key in self.entries

    def keys(self) -> list[GraphKey]:
        return sorted(self.entries)

    def merge(self, tree: GroupTree, document: str) -> "KnowledgeGraph":
        """Store ``tree`` under its (country, domain), replacing any older entry."""
        key = _key(tree.country, tree.domain)
        with self._lock:
            if key in self.entries:
                log.info("Replacing group tree for %s/%s", *key)
            self.entries[key] = tree
            self.source_documents[key] = document
        get_run_ledger().record(
            "merge_into_graph",
            country=key[0],
            domain=key[1],
            details={"nodes": len(tree.nodes), "depth": tree.depth},
        )
        return self

    def get(self, country: str, domain: Union[Domain, str]) -> GroupTree:
        key = _key(country, domain)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingEntry(*key)

    def snapshot(self) -> GraphSnapshot:
        with self._lock:
            return GraphSnapshot(MappingProxyType(dict(self.entries)))

    # -------------------------------------------------------------------------
    # Persistence
    # -------------------------------------------------------------------------

    def save(self, directory: Union[str, Path]) -> Path:
        """Write one ``<COUNTRY>_<domain>.txt`` per entry plus ``index.json``."""
        target = Path(directory).expanduser()
        entries: list[dict[str, str]] = []
        try:
            target.mkdir(parents=True, exist_ok=True)
            for country, domain in self.keys():
                name = f"{country}_{domain}.txt"
                document = self.source_documents.get((country, domain)) or serialize_group_tree(
                    self.entries[(country, domain)]
                )
                (target / name).write_text(document, encoding="utf-8")
                entries.append({"country": country, "domain": domain, "file": name})
            index = {"schema_version": GRAPH_SCHEMA_VERSION, "entries": entries}
            (target / INDEX_FILE).write_text(
                json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
        except OSError as exc:
            raise ArtifactIOError(str(target), str(exc)) from exc
        log.info("Saved %d group trees to %s", len(self), target)
        return target

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "KnowledgeGraph":
        source = Path(directory).expanduser()
        try:
            index = json.loads((source / INDEX_FILE).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ArtifactIOError(str(source / INDEX_FILE), str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise ArtifactIOError(str(source / INDEX_FILE), f"invalid JSON: {exc.msg}") from exc

        graph = cls()
        for entry in index.get("entries", []):
            path = source / entry["file"]
            try:
                document = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ArtifactIOError(str(path), str(exc)) from exc
            tree = parse_group_tree(document, entry["country"], Domain(entry["domain"]))
            graph.merge(tree, document)
        return graph


def merge_into_graph(graph: KnowledgeGraph, tree: GroupTree, document: str) -> KnowledgeGraph:
    return graph.merge(tree, document)


def retrieve_layer(
    graph: TreeSource, country: str, domain: Union[Domain, str], layer_n: int
) -> list[GroupSpec]:
    """All groups on ``layer_n``, breadth-first with siblings in document order.

    Raises:
        MissingEntry: No tree for (country, domain).
        LayerOutOfRange: ``layer_n`` outside 1..depth.
    """
    tree = graph.get(country, domain)
    if layer_n < 1 or layer_n > tree.depth:
        raise LayerOutOfRange(layer_n, tree.depth)
    return [node for node in tree.bfs() if node.layer == layer_n]


def load_bundled_graph() -> KnowledgeGraph:
    """Graph preloaded with the group trees shipped inside the package."""
    data = resources.files("groupsim.hierarchy") / "data"
    index = json.loads((data / INDEX_FILE).read_text(encoding="utf-8"))
    graph = KnowledgeGraph()
    for entry in index["entries"]:
        document = (data / entry["file"]).read_text(encoding="utf-8")
        graph.merge(parse_group_tree(document, entry["country"], Domain(entry["domain"])), document)
    return graph


def ensure_tree(
    graph: KnowledgeGraph,
    country: str,
    domain: Domain,
    gateway: Optional["OracleGateway"] = None,
) -> GroupTree:
    """Return the cached tree, asking the oracle for one on a miss.

    Only gateways whose oracle can search for groups are asked; otherwise the
    miss surfaces as MissingEntry.
    """
    country = validate_country_code(country)
    if _key(country, domain) in graph:
        return graph.get(country, domain)
    if gateway is None or not gateway.supports_group_search:
        raise MissingEntry(*_key(country, domain))

    log.info("No cached groups for %s/%s, asking the oracle", country, domain.value)
    reply = gateway.generate_group_document(country, domain)
    document = extract_tree_block(reply)
    tree = parse_group_tree(document, country, domain)
    graph.merge(tree, document)
    return tree
