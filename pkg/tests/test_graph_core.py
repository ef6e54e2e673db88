"""Graph representation, builder collisions, union, rainbow checks, and the
text serialization format."""

from __future__ import annotations

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perturbham.errors import ConfigError, ContractError
from perturbham.graph_core import (
    REASON_COLOUR_REPEAT,
    REASON_MISSING_EDGE,
    ColouredGraph,
    Graph,
    GraphBuilder,
    VertexCycle,
    VertexPath,
    edge_key,
    is_rainbow,
    read_graph,
    union,
    write_graph,
)


@st.composite
def coloured_graphs(draw):
    n = draw(st.integers(min_value=2, max_value=9))
    r = draw(st.integers(min_value=2, max_value=3 * n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    edges = [(u, v, draw(st.integers(min_value=1, max_value=r))) for u, v in chosen]
    return ColouredGraph(n, r, edges)


class TestBuilder:
    def test_single_insertion(self):
        b = GraphBuilder(3, 5)
        assert b.add_edge(0, 1, 3) is False
        g = b.build()
        assert g.edge_count == 1
        assert g.psi(0, 1) == 3

    def test_canonical_order(self):
        b = GraphBuilder(3, 5)
        b.add_edge(1, 0, 3)
        g = b.build()
        assert g.has_edge(0, 1) and g.has_edge(1, 0)
        assert g.psi(0, 1) == g.psi(1, 0) == 3
        assert list(g.edges()) == [(0, 1)]

    def test_collision_keeps_original_colour(self):
        # Replay of two insertions: the second must be flagged and ignored.
        b = GraphBuilder(3, 9)
        first = b.add_edge(0, 1, 3)
        second = b.add_edge(0, 1, 5)
        assert (first, second) == (False, True)
        assert b.build().psi(0, 1) == 3

    @pytest.mark.parametrize(
        "u,v,c",
        [(0, 0, 1), (-1, 1, 1), (0, 3, 1), (0, 1, 0), (0, 1, 6)],
    )
    def test_rejects_out_of_range(self, u, v, c):
        b = GraphBuilder(3, 5)
        with pytest.raises(ConfigError):
            b.add_edge(u, v, c)


class TestUnion:
    def test_identity_with_empty(self):
        g = ColouredGraph(4, 7, [(0, 1, 2), (1, 2, 5)])
        assert union(g, ColouredGraph(4, 7)) == g

    def test_disjoint_edges(self):
        g1 = ColouredGraph(4, 3, [(0, 1, 1)])
        g2 = ColouredGraph(4, 3, [(2, 3, 2)])
        u = union(g1, g2)
        assert u.edge_count == 2
        assert u.psi(0, 1) == 1 and u.psi(2, 3) == 2

    def test_shared_edge_equal_colour(self):
        g1 = ColouredGraph(3, 3, [(0, 1, 2), (1, 2, 1)])
        g2 = ColouredGraph(3, 3, [(0, 1, 2)])
        u = union(g1, g2)
        assert sorted(u.colour.items()) == sorted(g1.colour.items())

    def test_colour_disagreement_rejected(self):
        g1 = ColouredGraph(3, 3, [(0, 1, 2)])
        g2 = ColouredGraph(3, 3, [(0, 1, 3)])
        with pytest.raises(ContractError):
            union(g1, g2)

    def test_mismatched_shapes_rejected(self):
        with pytest.raises(ContractError):
            union(ColouredGraph(3, 3), ColouredGraph(4, 3))
        with pytest.raises(ContractError):
            union(ColouredGraph(3, 3), ColouredGraph(3, 4))


class TestIsRainbow:
    def test_rainbow_triangle_cyclic(self):
        g = ColouredGraph(3, 3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
        assert is_rainbow(g, [0, 1, 2], cyclic=True)

    def test_monochromatic_path(self):
        g = ColouredGraph(3, 9, [(0, 1, 7), (1, 2, 7)])
        check = is_rainbow(g, [0, 1, 2])
        assert not check
        assert check.reason == REASON_COLOUR_REPEAT

    def test_four_cycle_repeat_vs_open_path(self):
        g = ColouredGraph(4, 4, [(0, 1, 1), (1, 2, 2), (2, 3, 3), (0, 3, 1)])
        cyc = is_rainbow(g, [0, 1, 2, 3], cyclic=True)
        assert not cyc and cyc.reason == REASON_COLOUR_REPEAT
        assert is_rainbow(g, [0, 1, 2, 3], cyclic=False)

    def test_missing_edge_reason(self):
        g = ColouredGraph(3, 3, [(0, 1, 1)])
        check = is_rainbow(g, [0, 1, 2])
        assert not check
        assert check.reason == REASON_MISSING_EDGE
        assert check.detail == (1, 2)

    def test_preconditions(self):
        g = ColouredGraph(3, 3, [(0, 1, 1)])
        with pytest.raises(ValueError):
            is_rainbow(g, [0])
        with pytest.raises(ValueError):
            is_rainbow(g, [0, 1, 0])


class TestPathsAndCycles:
    def test_path_from_seq_validates(self):
        g = ColouredGraph(3, 9, [(0, 1, 7), (1, 2, 7)])
        with pytest.raises(ContractError):
            VertexPath.from_seq(g, [0, 1, 2])
        p = VertexPath.from_seq(g, [0, 1])
        assert p.colours == frozenset({7})
        assert p.edge_length == 1

    def test_trivial_paths(self):
        g = ColouredGraph(3, 3)
        assert VertexPath.from_seq(g, []).edge_length == 0
        assert VertexPath.from_seq(g, [2]).edge_length == 0

    def test_cycle_requires_closing_edge(self):
        g = ColouredGraph(3, 3, [(0, 1, 1), (1, 2, 2)])
        with pytest.raises(ContractError):
            VertexCycle.from_seq(g, [0, 1, 2])

    def test_hamilton_flag(self):
        g = ColouredGraph(3, 3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
        cyc = VertexCycle.from_seq(g, [0, 1, 2])
        assert cyc.is_hamilton(3)
        assert not cyc.is_hamilton(4)
        assert len(cyc.colours) == 3


@given(coloured_graphs())
@settings(max_examples=80, deadline=None)
def test_round_trip_reinsertion_identity(g: ColouredGraph):
    b = GraphBuilder(g.n, g.r)
    for u, v, c in g.coloured_edges():
        assert b.add_edge(u, v, c) is False
    assert b.build() == g


@given(coloured_graphs())
@settings(max_examples=60, deadline=None)
def test_serialization_round_trip(g: ColouredGraph):
    buf = io.StringIO()
    write_graph(g, buf)
    buf.seek(0)
    assert read_graph(buf) == g


@given(st.integers(min_value=0, max_value=8), st.integers(min_value=0, max_value=8))
def test_edge_key_canonical(u, v):
    if u != v:
        assert edge_key(u, v) == edge_key(v, u) == (min(u, v), max(u, v))


def test_serialization_format():
    g = ColouredGraph(4, 9, [(2, 0, 5), (1, 3, 9)])
    buf = io.StringIO()
    write_graph(g, buf)
    assert buf.getvalue() == "4 9\n0 2 5\n1 3 9\n"


def test_graph_rejects_bad_edges():
    with pytest.raises(ConfigError):
        Graph(3, [(0, 0)])
    with pytest.raises(ConfigError):
        Graph(3, [(0, 3)])
    with pytest.raises(ContractError):
        ColouredGraph(3, 3, [(0, 1, 1), (1, 0, 2)])
