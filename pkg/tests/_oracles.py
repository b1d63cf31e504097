"""Slow reference implementations the test suite checks the library against.

Everything here favors obviousness over speed and shares no code paths with
the package: distances come from matrix powers, automorphisms from filtered
permutations or natural-order backtracking, cutsets from subset enumeration.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import networkx as nx
import numpy as np

from sepcert.graph import Graph, Metric


def nx_graph(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.vertices())
    h.add_edges_from(g.edges())
    return h


def brute_automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """Filter all n! permutations; use only for n <= 8."""
    assert g.n <= 8, "factorial filter is for tiny graphs"
    edges = {frozenset(e) for e in g.edges()}
    out = []
    for perm in itertools.permutations(range(1, g.n + 1)):
        if all(frozenset((perm[u - 1], perm[v - 1])) in edges for u, v in g.edges()):
            out.append(perm)
    return out


def natural_order_aut_count(g: Graph) -> int:
    """Count automorphisms by mapping vertices 1..n in natural order,
    checking full consistency against every earlier vertex."""
    n = g.n
    adj = [frozenset()] + [frozenset(g.neighbors(v)) for v in g.vertices()]
    deg = [0] + [g.degree(v) for v in g.vertices()]
    img = [0] * (n + 1)
    used = [False] * (n + 1)
    count = 0

    def rec(v: int) -> None:
        nonlocal count
        if v > n:
            count += 1
            return
        if v > 1 and v in adj[v - 1]:
            pool = adj[img[v - 1]]
        else:
            pool = range(1, n + 1)
        for c in pool:
            if used[c] or deg[c] != deg[v]:
                continue
            if any((u in adj[v]) != (img[u] in adj[c]) for u in range(1, v)):
                continue
            img[v] = c
            used[c] = True
            rec(v + 1)
            used[c] = False
            img[v] = 0

    rec(1)
    return count


def numpy_distances(g: Graph) -> dict[tuple[int, int], float]:
    """All-pairs distances from boolean adjacency powers."""
    n = g.n
    a = np.zeros((n, n), dtype=bool)
    for u, v in g.edges():
        a[u - 1, v - 1] = a[v - 1, u - 1] = True
    dist = np.full((n, n), math.inf)
    np.fill_diagonal(dist, 0.0)
    reach = np.eye(n, dtype=bool)
    for d in range(1, n):
        reach = reach @ a
        newly = reach & np.isinf(dist)
        if not newly.any():
            break
        dist[newly] = float(d)
    return {
        (u, v): dist[u - 1, v - 1] for u in g.vertices() for v in g.vertices()
    }


def brute_girth(g: Graph) -> float:
    """Shortest cycle length: for each edge, shortest path between its ends
    avoiding the edge, plus one."""
    h = nx_graph(g)
    best = math.inf
    for u, v in g.edges():
        h.remove_edge(u, v)
        try:
            best = min(best, nx.shortest_path_length(h, u, v) + 1)
        except nx.NetworkXNoPath:
            pass
        h.add_edge(u, v)
    return best


def brute_angular_girth(g: Graph, metric: Metric) -> Fraction | float:
    h = nx_graph(g)
    for u, v in g.edges():
        h[u][v]["w"] = metric.edge_length((u, v))
    best: Fraction | float = math.inf
    for u, v in g.edges():
        w = h[u][v]["w"]
        h.remove_edge(u, v)
        try:
            best = min(best, nx.shortest_path_length(h, u, v, weight="w") + w)
        except nx.NetworkXNoPath:
            pass
        h.add_edge(u, v, w=w)
    return best


def brute_star_cutsets(g: Graph) -> set[frozenset[int]]:
    """All cutsets that are pairwise at distance >= 3, leave exactly two
    components, and have no proper subset that disconnects. Exponential in
    both the vertex count and cutset size; n <= 14 or so."""
    assert g.n <= 14, "subset enumeration is for small graphs"
    h = nx_graph(g)
    dist = dict(nx.all_pairs_shortest_path_length(h))
    verts = list(g.vertices())
    found: set[frozenset[int]] = set()

    def disconnects(sub: frozenset[int]) -> bool:
        rest = h.subgraph(v for v in verts if v not in sub)
        return rest.number_of_nodes() > 0 and not nx.is_connected(rest)

    for r in range(1, g.n - 1):
        for combo in itertools.combinations(verts, r):
            c = frozenset(combo)
            if any(
                dist[u].get(v, math.inf) < 3 for u, v in itertools.combinations(combo, 2)
            ):
                continue
            rest = h.subgraph(v for v in verts if v not in c)
            if rest.number_of_nodes() == 0:
                continue
            if nx.number_connected_components(rest) != 2:
                continue
            if any(
                disconnects(frozenset(s))
                for k in range(1, r)
                for s in itertools.combinations(combo, k)
            ):
                continue
            found.add(c)
    return found


def separates(g: Graph, c: frozenset[int], x: int, y: int) -> bool:
    """Do x and y land in different pieces once c is deleted?"""
    h = nx_graph(g)
    rest = h.subgraph(v for v in g.vertices() if v not in c)
    if x in c or y in c:
        return False
    return y not in nx.node_connected_component(rest, x)
