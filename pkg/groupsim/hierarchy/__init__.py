"""Group trees, the knowledge graph and agent instantiation."""

from .agents import describe_group, instantiate_agents
from .graph import (
    GraphSnapshot,
    KnowledgeGraph,
    ensure_tree,
    load_bundled_graph,
    merge_into_graph,
    retrieve_layer,
)
from .parser import (
    GroupTree,
    extract_tree_block,
    parse_group_tree,
    population_discrepancies,
    serialize_group_tree,
)

__all__ = [
    "GroupTree",
    "GraphSnapshot",
    "KnowledgeGraph",
    "parse_group_tree",
    "serialize_group_tree",
    "population_discrepancies",
    "extract_tree_block",
    "merge_into_graph",
    "retrieve_layer",
    "load_bundled_graph",
    "ensure_tree",
    "describe_group",
    "instantiate_agents",
]
