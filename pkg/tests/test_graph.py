import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qclique.errors import BruteForceLimitError, GraphParseError, NodeRangeError, SelfLoopError, WidthMismatchError
from qclique.graph import (
    AdjacencyMatrix,
    NodeSubset,
    WeightedMatrix,
    binarize,
    closed_neighborhood,
    edge_density,
    enumerate_maximal_cliques,
    intersect_columns,
    is_clique,
    is_maximal_clique,
    order_complex_thresholds,
    parse_graph,
)


def graphs(max_n=7):
    return st.integers(1, max_n).flatmap(
        lambda n: st.integers(0, (1 << (n * (n - 1) // 2)) - 1).map(
            lambda k: AdjacencyMatrix.from_index(n, k)
        )
    )


def brute_force_maximal(a):
    """Maximal cliques straight from the definition: cliques with no clique superset."""
    nodes = range(1, a.n + 1)
    cliques = [set(s) for r in range(1, a.n + 1) for s in itertools.combinations(nodes, r)
               if all(a.entries[u - 1, v - 1] for u, v in itertools.combinations(s, 2))]
    return {NodeSubset.from_nodes(a.n, c) for c in cliques if not any(c < d for d in cliques)}


class TestNodeSubset:
    def test_bit_order_node1_is_msb(self):
        s = NodeSubset.from_nodes(3, [1, 2])
        assert str(s) == "110"
        assert s.value == 6
        assert s.bits == (1, 1, 0)
        assert s.nodes == (1, 2)

    def test_roundtrip_string(self):
        assert NodeSubset.from_string("011").nodes == (2, 3)
        assert 3 in NodeSubset.from_string("011")
        assert 1 not in NodeSubset.from_string("011")

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            NodeSubset(2, 4)


class TestParse:
    def test_edgelist_path(self):
        a = parse_graph("3\n1 2\n2 3")
        assert a.entries.tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]

    def test_edgelist_no_edges(self):
        assert parse_graph("2\n").entries.tolist() == [[0, 0], [0, 0]]

    def test_matrix_json_k2(self):
        assert parse_graph("[[0,1],[1,0]]", "matrix-json") == AdjacencyMatrix.complete(2)

    def test_dimacs(self):
        text = "c path\np edge 3 2\ne 1 2\ne 2 3\n"
        assert parse_graph(text, "dimacs") == AdjacencyMatrix.path(3)

    def test_duplicates_collapse_and_comments(self):
        a = parse_graph("# header\n3\n1 2  # first\n2 1\n1 2\n")
        assert a.edges == [(1, 2)]

    def test_self_loop_rejected(self):
        with pytest.raises(SelfLoopError) as exc:
            parse_graph("3\n1 2\n2 2\n")
        assert exc.value.line == 3

    def test_out_of_range(self):
        with pytest.raises(NodeRangeError) as exc:
            parse_graph("3\n1 4\n")
        assert exc.value.line == 2

    @pytest.mark.parametrize("text,line", [("3\n1 x\n", 2), ("3\n1 2 3\n", 2), ("a\n", 1), ("", 1)])
    def test_syntax_errors_carry_line(self, text, line):
        with pytest.raises(GraphParseError) as exc:
            parse_graph(text)
        assert exc.value.line == line

    def test_json_errors(self):
        with pytest.raises(GraphParseError):
            parse_graph("[[0,1],\n[1,0]", "matrix-json")
        with pytest.raises(SelfLoopError):
            parse_graph("[[1,0],[0,0]]", "matrix-json")
        with pytest.raises(GraphParseError):
            parse_graph("[[0,1],[0,0]]", "matrix-json")
        with pytest.raises(GraphParseError):
            parse_graph("[[0,2],[2,0]]", "matrix-json")

    def test_dimacs_errors(self):
        with pytest.raises(GraphParseError) as exc:
            parse_graph("e 1 2\n", "dimacs")
        assert exc.value.line == 1
        with pytest.raises(SelfLoopError):
            parse_graph("p edge 2 1\ne 1 1\n", "dimacs")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            parse_graph("1\n", "graphml")


class TestBinarize:
    def test_above_max_is_empty(self):
        w = WeightedMatrix([[0, 0.3, 0.1], [0.3, 0, 0.7], [0.1, 0.7, 0]])
        assert binarize(w, 0.8).num_edges == 0

    def test_just_below_unique_max_gives_one_edge(self):
        w = WeightedMatrix([[0, 0.3, 0.1], [0.3, 0, 0.7], [0.1, 0.7, 0]])
        a = binarize(w, 0.7 - 1e-12)
        assert a.edges == [(2, 3)]

    def test_strict_comparison(self):
        w = WeightedMatrix([[0, 0.5], [0.5, 0]])
        assert binarize(w, 0.5).num_edges == 0

    def test_below_min_is_complete(self):
        w = WeightedMatrix([[5, 0.3, 0.1], [0.3, 5, 0.7], [0.1, 0.7, 5]])
        assert binarize(w, 0.0) == AdjacencyMatrix.complete(3)

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            WeightedMatrix([[0, 1], [0, 0]])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 6).flatmap(lambda n: st.lists(
        st.floats(-1, 1, allow_nan=False), min_size=n * n, max_size=n * n)))
    def test_monotone_in_threshold(self, flat):
        n = int(round(len(flat) ** 0.5))
        m = np.array(flat).reshape(n, n)
        w = WeightedMatrix((m + m.T) / 2)
        prev = None
        for thr in order_complex_thresholds(w):
            edges = set(binarize(w, thr).edges)
            if prev is not None:
                assert prev <= edges
            prev = edges
        assert prev == set(AdjacencyMatrix.complete(n).edges)


class TestDensity:
    def test_path(self, p3):
        assert edge_density(p3) == pytest.approx(2 / 3)

    def test_empty_and_complete(self):
        assert edge_density(AdjacencyMatrix.empty(4)) == 0
        assert edge_density(AdjacencyMatrix.complete(4)) == 1

    def test_single_node(self):
        with pytest.raises(ValueError):
            edge_density(AdjacencyMatrix.empty(1))


class TestIntersection:
    def test_closed_neighborhood(self, p3):
        assert str(closed_neighborhood(p3, 1)) == "110"
        assert str(closed_neighborhood(p3, 2)) == "111"
        assert str(closed_neighborhood(AdjacencyMatrix.empty(3), 2)) == "010"
        with pytest.raises(IndexError):
            closed_neighborhood(p3, 4)

    def test_intersect(self, p3):
        assert str(intersect_columns(p3, "110")) == "110"
        assert str(intersect_columns(p3, "111")) == "010"
        assert str(intersect_columns(p3, "000")) == "111"

    def test_width_mismatch(self, p3):
        with pytest.raises(WidthMismatchError):
            intersect_columns(p3, "10")
        with pytest.raises(WidthMismatchError):
            is_maximal_clique(p3, "1100")

    @pytest.mark.parametrize("x,expected", [("110", 1), ("111", 0), ("010", 0), ("011", 1), ("000", 0)])
    def test_maximal_p3(self, p3, x, expected):
        assert is_maximal_clique(p3, x) == expected

    def test_isolated_singleton(self):
        assert is_maximal_clique(AdjacencyMatrix.empty(2), "10") == 1


class TestEnumerate:
    def test_p3(self, p3):
        assert [str(c) for c in enumerate_maximal_cliques(p3)] == ["110", "011"]

    def test_empty3(self):
        assert [str(c) for c in enumerate_maximal_cliques(AdjacencyMatrix.empty(3))] == ["100", "010", "001"]

    def test_k3(self, k3):
        assert [str(c) for c in enumerate_maximal_cliques(k3)] == ["111"]

    def test_descending_order(self):
        a = AdjacencyMatrix.random(8, 0.4, rng=3)
        values = [c.value for c in enumerate_maximal_cliques(a)]
        assert values == sorted(values, reverse=True)

    def test_cap(self):
        with pytest.raises(BruteForceLimitError):
            enumerate_maximal_cliques(AdjacencyMatrix.empty(25))

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exhaustive_membership(self, n):
        for a in AdjacencyMatrix.all_graphs(n):
            found = {c.value for c in enumerate_maximal_cliques(a)}
            for xv in range(1 << n):
                assert is_maximal_clique(a, xv) == (xv in found)

    def test_all_64_graphs_on_4_nodes(self):
        assert len(AdjacencyMatrix.all_graphs(4)) == 64

    @settings(max_examples=100, deadline=None)
    @given(graphs())
    def test_matches_definition(self, a):
        assert set(enumerate_maximal_cliques(a)) == brute_force_maximal(a)

    @settings(max_examples=100, deadline=None)
    @given(graphs(8))
    def test_clique_antichain_cover(self, a):
        cliques = enumerate_maximal_cliques(a)
        for c in cliques:
            assert is_clique(a, c)
        for c, d in itertools.permutations(cliques, 2):
            assert c.value & d.value != c.value
        covered = 0
        for c in cliques:
            covered |= c.value
        assert covered == (1 << a.n) - 1


class TestAdjacencyMatrix:
    def test_invariants(self):
        with pytest.raises(ValueError):
            AdjacencyMatrix([[0, 1], [0, 0]])
        with pytest.raises(SelfLoopError):
            AdjacencyMatrix([[1, 0], [0, 0]])
        with pytest.raises(ValueError):
            AdjacencyMatrix([[0, 2], [2, 0]])

    def test_immutable(self, p3):
        with pytest.raises(ValueError):
            p3.entries[0, 1] = 0

    def test_digest_stable(self, p3):
        assert p3.digest() == AdjacencyMatrix.path(3).digest()
        assert p3.digest() != AdjacencyMatrix.complete(3).digest()

    def test_closed(self, p3):
        assert p3.closed().tolist() == [[1, 1, 0], [1, 1, 1], [0, 1, 1]]
