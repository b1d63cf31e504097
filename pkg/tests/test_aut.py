"""Automorphism groups, group actions, and canonical forms against the
factorial-filter and natural-order backtracking oracles."""

from __future__ import annotations

import random

import pytest

from _oracles import brute_automorphisms, natural_order_aut_count
from sepcert.aut import (
    automorphism_group,
    canonical_certificate,
    canonical_form,
    cycle_notation,
    identity,
    is_distance_transitive,
    orbit_of_vertex_set,
)
from sepcert.datasets import named_graph
from sepcert.errors import GroupError
from sepcert.graph import Graph


@pytest.mark.parametrize("name", ["k4", "c5", "p4", "q3", "theta"])
def test_elements_match_factorial_filter(name):
    g = named_graph(name)
    grp = automorphism_group(g)
    assert grp.enumerated
    assert set(grp.elements) == set(brute_automorphisms(g))


@pytest.mark.parametrize(
    "name,order",
    [("k4", 24), ("k33", 72), ("prism", 12), ("petersen", 120), ("heawood", 336)],
)
def test_order_matches_backtracking_oracle(name, order):
    g = named_graph(name)
    grp = automorphism_group(g)
    assert grp.order == order
    assert natural_order_aut_count(g) == order


def test_every_element_is_an_automorphism():
    g = named_graph("petersen")
    edges = set(g.edges())
    for p in automorphism_group(g).elements:
        mapped = {tuple(sorted((p[u - 1], p[v - 1]))) for u, v in edges}
        assert mapped == edges


def test_orbit_stabilizer_identity():
    g = named_graph("prism")
    grp = automorphism_group(g)
    for v in g.vertices():
        assert len(grp.orbit_of_vertex(v)) * grp.stabilizer_order(v) == grp.order


def test_vertex_orbits_partition():
    g = Graph(4, [(1, 2), (2, 3)])  # path plus isolated vertex
    grp = automorphism_group(g)
    orbits = grp.vertex_orbits()
    assert sorted(v for orb in orbits for v in orb) == [1, 2, 3, 4]
    assert (1, 3) in orbits and (2,) in orbits and (4,) in orbits


def test_enumeration_budget():
    g = named_graph("heawood")
    grp = automorphism_group(g, enumerate_budget=10)
    assert not grp.enumerated
    assert grp.order is None
    with pytest.raises(GroupError):
        grp.require_enumerated("test")
    # generators still generate: closing them recovers the order
    full = automorphism_group(g)
    assert full.order == 336


def test_orbit_of_vertex_set():
    g = named_graph("c6")
    grp = automorphism_group(g)
    orbit = orbit_of_vertex_set(grp, {1, 4})
    assert set(orbit) == {frozenset({1, 4}), frozenset({2, 5}), frozenset({3, 6})}


@pytest.mark.parametrize("name,expected", [("q3", True), ("petersen", True), ("heawood", True), ("prism", False)])
def test_distance_transitivity(name, expected):
    g = named_graph(name)
    grp = automorphism_group(g)
    flag, witness = is_distance_transitive(g, grp)
    assert flag is expected
    if not flag:
        assert witness["pair"]


def test_cycle_notation():
    assert cycle_notation(identity(4)) == "()"
    assert cycle_notation((2, 1, 4, 3)) == "(1 2)(3 4)"
    assert cycle_notation((2, 3, 1)) == "(1 2 3)"


def test_canonical_certificate_isomorphism_invariant():
    rng = random.Random(7)
    g = named_graph("petersen")
    base = canonical_certificate(g)
    for _ in range(5):
        perm = list(range(1, g.n + 1))
        rng.shuffle(perm)
        assert canonical_certificate(g.relabel(perm)) == base


def test_canonical_certificate_separates_nonisomorphic():
    # both cubic on six vertices, but only one is bipartite
    assert canonical_certificate(named_graph("prism")) != canonical_certificate(named_graph("k33"))


def test_canonical_form_labeling_is_consistent():
    g = named_graph("q3")
    form = canonical_form(g)
    assert sorted(form.labeling) == list(g.vertices())
    assert form.certificate == canonical_certificate(g)
