"""Graph construction, parsing, metrics, and structural invariants, checked
against the slow oracles in _oracles.py."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from _oracles import brute_girth, numpy_distances
from sepcert.datasets import named_graph
from sepcert.errors import GraphFormatError, MetricError
from sepcert.graph import (
    Graph,
    Metric,
    bipartition,
    components,
    distances,
    edge_key,
    format_graph,
    girth,
    is_connected,
    parse_graph,
    parse_rational,
    structural_report,
    subdivide,
)


def test_edge_key_sorts_and_rejects_loops():
    assert edge_key(5, 2) == (2, 5)
    assert edge_key(2, 5) == (2, 5)
    with pytest.raises(GraphFormatError):
        edge_key(3, 3)


def test_graph_rejects_bad_edges():
    with pytest.raises(GraphFormatError):
        Graph(3, [(1, 2), (2, 1)])  # duplicate under canonical form
    with pytest.raises(GraphFormatError):
        Graph(3, [(1, 4)])


def test_from_adjacency_requires_symmetry():
    g = Graph.from_adjacency({1: [2], 2: [1, 3], 3: [2]})
    assert g.edges() == ((1, 2), (2, 3))
    with pytest.raises(GraphFormatError):
        Graph.from_adjacency({1: [2], 2: [3], 3: [2]})


def test_neighbors_sorted_and_degree():
    g = named_graph("petersen")
    for v in g.vertices():
        assert g.neighbors(v) == tuple(sorted(g.neighbors(v)))
        assert g.degree(v) == 3


def test_relabel_preserves_shape():
    g = named_graph("q3")
    perm = (2, 3, 4, 5, 6, 7, 8, 1)
    h = g.relabel(perm)
    assert h.m == g.m
    assert sorted(h.degree(v) for v in h.vertices()) == [3] * 8


# ------------------------------------------------------------- parsing --


def test_parse_graph_plain_and_header():
    g, metric = parse_graph("p 4 3\n1 2\n2 3 # comment\n\n3 4\n")
    assert (g.n, g.m) == (4, 3)
    assert metric.kind == "combinatorial"
    assert metric.units == "edges"


def test_parse_graph_infers_vertex_count():
    g, _ = parse_graph("1 2\n2 7\n")
    assert g.n == 7


def test_parse_graph_lengths():
    g, metric = parse_graph("1 2 1/3\n2 3 2/3\n")
    assert metric.kind == "angular"
    assert metric.edge_length((2, 1)) == Fraction(1, 3)
    assert metric.units == "pi"


@pytest.mark.parametrize(
    "text",
    [
        "1 2\n1 2 1/3\n",  # mixed rows
        "1 2\np 2 1\n",  # stray header
        "p 2\n1 2\n",  # short header
        "1 2 0\n",  # non-positive length
        "1 two\n",  # bad id
        "1 2 3 4\n",  # too many fields
        "p 3 5\n1 2\n",  # edge count mismatch
    ],
)
def test_parse_graph_rejects(text):
    with pytest.raises((GraphFormatError, MetricError)):
        parse_graph(text)


def test_format_graph_round_trip():
    g = named_graph("heawood")
    g2, _ = parse_graph(format_graph(g))
    assert g2 == g


def test_format_graph_round_trip_with_lengths():
    g = Graph(3, [(1, 2), (2, 3), (1, 3)])
    metric = Metric.angular({(1, 2): Fraction(1, 3), (2, 3): Fraction(1, 2), (1, 3): Fraction(2, 3)})
    g2, m2 = parse_graph(format_graph(g, metric))
    assert g2 == g
    assert m2.lengths() == metric.lengths()


def test_parse_rational():
    assert parse_rational("2/3") == Fraction(2, 3)
    with pytest.raises(GraphFormatError):
        parse_rational("1/0")
    with pytest.raises(GraphFormatError):
        parse_rational("x")


# ------------------------------------------------------------- metrics --


def test_metric_requires_full_coverage():
    g = Graph(3, [(1, 2), (2, 3)])
    metric = Metric.angular({(1, 2): Fraction(1, 3)})
    with pytest.raises(MetricError):
        metric.validate_for(g)


def test_angular_distances_are_exact_fractions():
    g = Graph(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
    metric = Metric.angular({e: Fraction(1, 3) for e in g.edges()})
    table = distances(g, metric)
    assert table.get(1, 3) == Fraction(2, 3)
    assert table.get(1, 1) == 0


# --------------------------------------------------- structure oracles --


@pytest.mark.parametrize("name", ["q3", "k4", "k33", "heawood", "petersen", "prism", "c5", "theta"])
def test_distances_match_matrix_power_oracle(name):
    g = named_graph(name)
    table = distances(g)
    expected = numpy_distances(g)
    for (u, v), d in expected.items():
        got = table.get(u, v)
        assert got == d or (got == math.inf and math.isinf(d))


@pytest.mark.parametrize(
    "name,expected_girth",
    [("q3", 4), ("k4", 3), ("k33", 4), ("heawood", 6), ("petersen", 5), ("c8", 8), ("p4", math.inf)],
)
def test_girth_matches_oracle(name, expected_girth):
    g = named_graph(name)
    got = girth(g)
    assert got == expected_girth
    assert got == brute_girth(g)


def test_girth_with_angular_metric():
    g = Graph(3, [(1, 2), (2, 3), (1, 3)])
    metric = Metric.angular({e: Fraction(1, 3) for e in g.edges()})
    assert girth(g, metric) == Fraction(1)


def test_structural_report_known_values():
    rep = structural_report(named_graph("petersen"))
    assert rep["vertices"] == 10
    assert rep["edges"] == 15
    assert rep["degree_histogram"] == {3: 10}
    assert rep["connected"] is True
    assert rep["bipartite"] is False
    assert rep["girth"] == 5
    assert rep["diameter"] == 2


def test_bipartition():
    g = named_graph("heawood")
    parts = bipartition(g)
    assert parts is not None
    a, b = parts
    assert len(a) == len(b) == 7
    aset = set(a)
    for u, v in g.edges():
        assert (u in aset) != (v in aset)
    assert bipartition(named_graph("petersen")) is None


def test_components_and_connectivity():
    g = Graph(5, [(1, 2), (3, 4)])
    assert components(g) == ((1, 2), (3, 4), (5,))
    assert components(g, removed_vertices=(1,)) == ((2,), (3, 4), (5,))
    assert not is_connected(g)
    assert is_connected(named_graph("q3"))


def test_subdivide_counts_and_midpoints():
    g = named_graph("k4")
    g2, m2, mid = subdivide(g)
    assert g2.n == g.n + g.m
    assert g2.m == 2 * g.m
    assert sorted(mid.values()) == list(range(g.n + 1, g.n + g.m + 1))
    for e, node in mid.items():
        u, v = e
        assert g2.has_edge(u, node) and g2.has_edge(v, node)
        assert m2.edge_length((u, node)) == Fraction(1, 2)
