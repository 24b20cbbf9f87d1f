"""Tests for group trees, the knowledge graph and agent instantiation."""

from __future__ import annotations

import logging

import pytest

from groupsim.core.exceptions import (
    ArtifactIOError,
    DuplicateGroup,
    LayerOutOfRange,
    MalformedTree,
    MissingEntry,
    ValidationError,
)
from groupsim.core.models import Characteristic, Domain, GroupSpec
from groupsim.hierarchy import (
    KnowledgeGraph,
    describe_group,
    ensure_tree,
    extract_tree_block,
    instantiate_agents,
    parse_group_tree,
    population_discrepancies,
    retrieve_layer,
    serialize_group_tree,
)
from groupsim.oracle import OracleGateway

SMALL_TREE = """\
## Fans: 1,000 (susceptible)
  1. **Casual: 600**
    - Weekend: 400
    - Online: 200
  2. **Core: 400** (ordinary)
## Players: 50
"""


class _SearchOracle:
    """Oracle double that answers group searches with prose around a tree."""

    name = "search-double"
    supports_group_search = True

    def __init__(self, document: str) -> None:
        self.document = document
        self.calls = 0

    def complete(self, request, prompt):
        self.calls += 1
        return f"Here is the hierarchy you asked for:\n{self.document}\nHope this helps."


class TestParseGroupTree:
    """Tests for parse_group_tree."""

    def test_bundled_tree_shape(self, graph):
        tree = graph.get("CN", Domain.EDUCATION)
        assert [n.name for n in tree.roots] == ["Students", "Teachers"]
        assert tree.depth == 3
        assert len(tree.leaves) == 16
        students = tree.find("Students")
        assert students is not None
        assert students.population == 58_030_769
        assert students.characteristic is Characteristic.SUSCEPTIBLE

    def test_students_leaves(self, graph):
        tree = graph.get("CN", "education")
        leaves = {n.name: n.population for n in tree.leaves if n.name in {
            "Doctor", "Master", "Bachelor", "Normal", "Short-cycle"
        }}
        assert leaves == {
            "Doctor": 556_065,
            "Master": 3_097_548,
            "Bachelor": 19_656_436,
            "Normal": 8_926_980,
            "Short-cycle": 25_794_740,
        }

    def test_discrepancies_are_warned_not_fatal(self, graph, caplog):
        document = graph.source_documents[("CN", "education")]
        with caplog.at_level(logging.WARNING):
            tree = parse_group_tree(document, "CN", Domain.EDUCATION)
        mismatched = {name for name, _, _ in population_discrepancies(tree)}
        assert mismatched == {"Teachers", "Vocation"}
        teachers = next(d for d in population_discrepancies(tree) if d[0] == "Teachers")
        assert teachers == ("Teachers", 3_450_000, 4_742_695)
        assert any("Teachers" in r.getMessage() for r in caplog.records)

    def test_serialize_is_fixed_point(self, graph):
        tree = graph.get("CN", Domain.EDUCATION)
        text = serialize_group_tree(tree)
        again = parse_group_tree(text, "CN", Domain.EDUCATION)
        assert again == tree
        assert serialize_group_tree(again) == text

    def test_underscore_separators_and_parents(self):
        tree = parse_group_tree("## A: 1_000\n  1. **B: 1_000**\n", "US", Domain.SPORTS)
        assert tree.find("B").population == 1000
        assert tree.find("B").parent == "A"
        assert tree.find("A").characteristic is None

    def test_bfs_order(self):
        tree = parse_group_tree(SMALL_TREE, "US", Domain.SPORTS)
        assert [n.name for n in tree.bfs()] == [
            "Fans", "Players", "Casual", "Core", "Weekend", "Online"
        ]

    @pytest.mark.parametrize(
        "document,line",
        [
            ("## Students 100", 1),
            ("## Students: lots", 1),
            ("## A: 1\n#### B: 1", 2),
            ("  1. **Orphan: 5**", 1),
            ("## A: 1\n  - Leaf: 1", 2),
            ("## A: 1\n## A: 2", 2),
            ("Students: 100", 1),
            ("## A: 1 (volatile)", 1),
            ("", 0),
        ],
    )
    def test_malformed(self, document, line):
        with pytest.raises(MalformedTree) as exc_info:
            parse_group_tree(document, "CN", Domain.EDUCATION)
        assert exc_info.value.line == line

    def test_extract_tree_block_drops_prose(self):
        reply = "Sure!\n## A: 10\nsome words\n  1. **B: 10**\n    - C: 10\nThanks"
        assert extract_tree_block(reply) == "## A: 10\n  1. **B: 10**\n    - C: 10"


class TestRetrieveLayer:
    """Tests for retrieve_layer."""

    def test_layer_one(self, graph):
        layer = retrieve_layer(graph, "CN", Domain.EDUCATION, 1)
        assert [g.name for g in layer] == ["Students", "Teachers"]

    def test_layer_three_is_all_leaves_in_order(self, graph):
        layer = retrieve_layer(graph, "cn", "education", 3)
        assert len(layer) == 16
        assert layer[0].name == "Doctor"
        assert layer[-1].name == "Affiliated-Teachers"

    @pytest.mark.parametrize("layer_n", [0, 4])
    def test_out_of_range(self, graph, layer_n):
        with pytest.raises(LayerOutOfRange):
            retrieve_layer(graph, "CN", Domain.EDUCATION, layer_n)

    def test_missing_entry(self, graph):
        with pytest.raises(MissingEntry):
            retrieve_layer(graph, "US", Domain.EDUCATION, 1)

    def test_snapshot_is_independent(self, graph):
        snapshot = graph.snapshot()
        graph.merge(parse_group_tree(SMALL_TREE, "US", Domain.SPORTS), SMALL_TREE)
        assert len(snapshot) == 1
        with pytest.raises(MissingEntry):
            snapshot.get("US", Domain.SPORTS)


class TestKnowledgeGraph:
    """Tests for graph persistence and oracle-backed lookups."""

    def test_save_and_load(self, graph, tmp_path):
        graph.merge(parse_group_tree(SMALL_TREE, "US", Domain.SPORTS), SMALL_TREE)
        graph.save(tmp_path / "graph")
        loaded = KnowledgeGraph.load(tmp_path / "graph")
        assert loaded.keys() == [("CN", "education"), ("US", "sports")]
        assert loaded.get("US", Domain.SPORTS) == graph.get("US", Domain.SPORTS)

    def test_load_missing_index(self, tmp_path):
        with pytest.raises(ArtifactIOError):
            KnowledgeGraph.load(tmp_path)

    def test_merge_replaces(self):
        graph = KnowledgeGraph()
        graph.merge(parse_group_tree(SMALL_TREE, "US", Domain.SPORTS), SMALL_TREE)
        graph.merge(parse_group_tree("## Only: 5\n", "US", Domain.SPORTS), "## Only: 5\n")
        assert len(graph) == 1
        assert [n.name for n in graph.get("US", Domain.SPORTS).nodes] == ["Only"]

    def test_ensure_tree_cached(self, graph, gateway):
        assert ensure_tree(graph, "cn", Domain.EDUCATION, gateway).depth == 3

    def test_ensure_tree_without_search(self, graph, gateway):
        with pytest.raises(MissingEntry):
            ensure_tree(graph, "US", Domain.SPORTS, gateway)

    def test_ensure_tree_asks_oracle_once(self):
        oracle = _SearchOracle(SMALL_TREE)
        graph = KnowledgeGraph()
        tree = ensure_tree(graph, "US", Domain.SPORTS, OracleGateway(oracle))
        assert [n.name for n in tree.roots] == ["Fans", "Players"]
        ensure_tree(graph, "US", Domain.SPORTS, OracleGateway(oracle))
        assert oracle.calls == 1
        assert ("US", "sports") in graph


class TestInstantiateAgents:
    """Tests for instantiate_agents."""

    def test_layer_one_agents(self, graph):
        specs = retrieve_layer(graph, "CN", Domain.EDUCATION, 1)
        agents = instantiate_agents(specs, "CN")
        assert [a.id for a in agents] == ["Students-agents", "Teachers-agents"]
        assert agents[0].characteristic is Characteristic.SUSCEPTIBLE
        assert agents[0].state.emotions.intensity == 0.0
        assert len(agents[0].memory) == 0
        assert "58,030,769 CN Students" in agents[0].description

    def test_missing_characteristic_from_keywords(self):
        specs = [
            GroupSpec("Graduate Students", 10, None, 1),
            GroupSpec("Retired Teachers", 10, None, 1),
            GroupSpec("Parents", 10, None, 1),
        ]
        agents = instantiate_agents(specs, "CN")
        assert [a.characteristic for a in agents] == [
            Characteristic.SUSCEPTIBLE,
            Characteristic.CALM,
            Characteristic.ORDINARY,
        ]

    def test_missing_characteristic_from_gateway(self, gateway):
        specs = [GroupSpec("Doctor", 10, None, 3)]
        agents = instantiate_agents(specs, "CN", gateway=gateway)
        assert agents[0].characteristic is Characteristic.CALM
        assert gateway.request_count == 1

    def test_duplicate_group(self):
        spec = GroupSpec("A", 1, Characteristic.CALM, 1)
        with pytest.raises(DuplicateGroup):
            instantiate_agents([spec, spec], "CN")

    def test_empty_specs(self):
        with pytest.raises(ValidationError):
            instantiate_agents([], "CN")

    def test_instantiation_is_repeatable(self, graph):
        specs = retrieve_layer(graph, "CN", Domain.EDUCATION, 3)
        first = [a.to_dict() for a in instantiate_agents(specs, "CN")]
        second = [a.to_dict() for a in instantiate_agents(specs, "CN")]
        assert first == second

    def test_memory_capacity(self):
        spec = GroupSpec("A", 1, Characteristic.CALM, 1)
        assert instantiate_agents([spec], "CN", memory_capacity=4)[0].memory.capacity == 4

    def test_describe_group(self):
        spec = GroupSpec("Doctor", 556_065, Characteristic.CALM, 3)
        assert describe_group(spec, "CN").startswith("Representing 556,065 CN Doctor")
