import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from interference_dags import Dag, NodeKind, Path, build_dag, build_figure, d_separated, enumerate_paths, path_blocked
from interference_dags.dag import (
    Relation,
    backdoor_paths,
    d_separated_bruteforce,
    descendants,
    first_open_path,
    relatives,
)
from interference_dags.errors import (
    CycleDetected,
    DanglingEdge,
    DuplicateNode,
    InvalidNode,
    InvalidPath,
    OverlappingSets,
    PathLimitExceeded,
    UnknownNode,
)

from .strategies import dags, random_dag

FIG1 = build_dag(["C", "A", "Y"], [("C", "A"), ("C", "Y"), ("A", "Y")])
FIG2 = build_dag("CAMY", [("C", "A"), ("C", "Y"), ("A", "M"), ("M", "Y"), ("A", "Y")])


def paths(dag, x, y):
    return {str(p) for p in enumerate_paths(dag, x, y)}


class TestBuild:
    def test_fig1(self):
        assert FIG1.nodes == ("A", "C", "Y")
        assert FIG1.edges == (("A", "Y"), ("C", "A"), ("C", "Y"))
        assert FIG1 == build_figure("fig1")

    def test_single_node(self):
        d = build_dag(["A"], [])
        assert d.nodes == ("A",) and d.edges == ()

    def test_two_cycle_is_named(self):
        with pytest.raises(CycleDetected) as info:
            build_dag(["A", "Y"], [("A", "Y"), ("Y", "A")])
        assert set(info.value.cycle) == {"A", "Y"}

    def test_longer_cycle(self):
        with pytest.raises(CycleDetected):
            build_dag("ABCD", [("A", "B"), ("B", "C"), ("C", "D"), ("D", "B")])

    def test_self_loop(self):
        with pytest.raises(CycleDetected):
            Dag(["A"], [("A", "A")])

    def test_duplicates_and_dangling(self):
        with pytest.raises(DuplicateNode):
            Dag(["A", "A"])
        with pytest.raises(DanglingEdge):
            Dag(["A"], [("A", "B")])

    def test_deterministic_needs_parents(self):
        with pytest.raises(InvalidNode):
            Dag({"Z": NodeKind.DETERMINISTIC})
        d = Dag({"X": NodeKind.OBSERVED, "Z": NodeKind.DETERMINISTIC}, [("X", "Z")])
        assert d.kind("Z") is NodeKind.DETERMINISTIC

    def test_empty_name_rejected(self):
        with pytest.raises(InvalidNode):
            Dag([""])

    def test_topological_order_respects_edges(self):
        d = build_figure("fig6")
        pos = {n: k for k, n in enumerate(d.topological_order)}
        assert all(pos[u] < pos[v] for u, v in d.edges)

    def test_unknown_node(self):
        with pytest.raises(UnknownNode):
            FIG1.parents("Q")
        with pytest.raises(KeyError):
            FIG1.children("Q")


class TestRelatives:
    def test_fig1_ancestors(self):
        assert relatives(FIG1, {"Y"}, Relation.ANCESTORS) == {"C", "A"}

    def test_empty_seed(self):
        assert relatives(FIG2, set(), Relation.DESCENDANTS) == frozenset()

    def test_fig2_parents(self):
        assert relatives(FIG2, {"Y"}, "parents") == {"C", "M", "A"}

    def test_children_and_descendants(self):
        assert relatives(FIG2, {"A"}, Relation.CHILDREN) == {"M", "Y"}
        assert descendants(FIG2, "C") == {"A", "M", "Y"}

    def test_unknown(self):
        with pytest.raises(UnknownNode):
            relatives(FIG2, {"Q"}, Relation.PARENTS)


class TestPaths:
    def test_fig1(self):
        assert paths(FIG1, "A", "Y") == {"A -> Y", "A <- C -> Y"}

    def test_disconnected(self):
        assert enumerate_paths(Dag(["A", "B"]), "A", "B") == []

    def test_fig2(self):
        assert paths(FIG2, "A", "Y") == {"A -> Y", "A -> M -> Y", "A <- C -> Y"}

    def test_paths_are_simple_and_valid(self):
        for p in enumerate_paths(build_figure("fig5a"), "A1", "Y2"):
            assert len(set(p.nodes)) == len(p.nodes)
            assert all(build_figure("fig5a").has_edge(*e) for e in p.edges())

    def test_limit(self):
        big = build_figure("fig16")
        with pytest.raises(PathLimitExceeded):
            enumerate_paths(big, "A1", "Y1", max_nodes=5)

    def test_parse_roundtrip(self):
        p = Path.parse("A <- C -> Y")
        assert str(p) == "A <- C -> Y" and p.is_backdoor and not p.is_directed

    def test_invalid_paths(self):
        with pytest.raises(InvalidPath):
            Path(("A",), ())
        with pytest.raises(InvalidPath):
            Path.parse("A -> Y -> A")


class TestBlocking:
    def test_collider_blocks(self):
        assert path_blocked(FIG1, Path.parse("C -> Y <- A"), set())

    def test_conditioned_collider_opens(self):
        assert not path_blocked(FIG1, Path.parse("C -> Y <- A"), {"Y"})

    def test_conditioned_noncollider_blocks(self):
        assert path_blocked(FIG2, Path.parse("A <- C -> Y"), {"C"})

    def test_descendant_of_collider_opens(self):
        d = Dag("ABCD", [("A", "C"), ("B", "C"), ("C", "D")])
        assert not path_blocked(d, Path.parse("A -> C <- B"), {"D"})

    def test_path_not_in_graph(self):
        with pytest.raises(InvalidPath):
            path_blocked(FIG1, Path.parse("Y -> A"), set())


class TestDSeparation:
    def test_fig6_endpoints_connected(self):
        assert not d_separated(build_figure("fig6"), {"Y1_T"}, {"Y2_T"}, {"A1", "A2"})

    def test_no_path(self):
        assert d_separated(Dag(["X", "Y", "Z"]), {"X"}, {"Y"}, {"Z"})

    def test_fig2_m_c_given_a(self):
        assert d_separated(FIG2, {"M"}, {"C"}, {"A"})
        assert d_separated_bruteforce(FIG2, {"M"}, {"C"}, {"A"})

    def test_overlap(self):
        with pytest.raises(OverlappingSets):
            d_separated(FIG1, {"A"}, {"A"})

    def test_empty_sets(self):
        assert d_separated(FIG1, set(), {"Y"})

    def test_first_open_path_is_a_witness(self):
        p = first_open_path(FIG1, {"A"}, {"Y"}, set(), backdoor_only=True)
        assert str(p) == "A <- C -> Y"
        assert not path_blocked(FIG1, p, set())


class TestBackdoorPaths:
    def test_fig1(self):
        assert [str(p) for p in backdoor_paths(FIG1, "A", "Y")] == ["A <- C -> Y"]

    def test_root_treatment(self):
        d = Dag("AMY", [("A", "M"), ("M", "Y")])
        assert backdoor_paths(d, "A", "Y") == []

    def test_fig5a_block(self):
        found = {str(p) for p in backdoor_paths(build_figure("fig5a"), "A2", "Y1")}
        assert "A2 <- C2 -> Y1" in found


def _nx(dag):
    g = nx.DiGraph()
    g.add_nodes_from(dag.nodes)
    g.add_edges_from(dag.edges)
    return g


@given(dags(max_nodes=7), st.data())
def test_dsep_matches_bruteforce_and_networkx(dag, data):
    nodes = list(dag.nodes)
    x = data.draw(st.sets(st.sampled_from(nodes), min_size=1, max_size=2))
    rest = [n for n in nodes if n not in x]
    if not rest:
        return
    y = data.draw(st.sets(st.sampled_from(rest), min_size=1, max_size=2))
    z = data.draw(st.sets(st.sampled_from([n for n in rest if n not in y] or rest), max_size=3)) - y
    fast = d_separated(dag, x, y, z)
    assert fast == d_separated_bruteforce(dag, x, y, z)
    assert fast == nx.is_d_separator(_nx(dag), x, y, z)


@given(dags(max_nodes=7))
def test_descendants_match_networkx(dag):
    g = _nx(dag)
    for n in dag.nodes:
        assert descendants(dag, n) == nx.descendants(g, n)


def test_random_dag_helper_is_acyclic():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = random_dag(rng, 8)
        assert nx.is_directed_acyclic_graph(_nx(d))
