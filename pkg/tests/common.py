"""Shared graph builders for the test suite."""

from __future__ import annotations

import random

from matchwidth.bigraph import BipartiteGraph, graph_from_edges
from matchwidth.digraph import Digraph, digraph_from_arcs


def even_cycle(k: int) -> BipartiteGraph:
    """C_{2k} with V1 = odd positions; vertex ids follow the cycle order
    a1, b1, a2, b2, ... mapped to ids 1..k (a's) and k+1..2k (b's)."""
    edges = []
    for i in range(1, k + 1):
        edges.append((i, k + i))  # a_i - b_i
        edges.append((i % k + 1, k + i))  # b_i - a_{i+1}
    return graph_from_edges(k, k, edges)


def path_graph(n_edges: int) -> BipartiteGraph:
    """Path a1-b1-a2-b2-... with n_edges edges (n_edges odd gives equal classes)."""
    total = n_edges + 1
    n1 = (total + 1) // 2
    n2 = total // 2
    edges = []
    for i in range(n_edges):
        even_pos = i if i % 2 == 0 else i + 1
        odd_pos = i + 1 if i % 2 == 0 else i
        edges.append((even_pos // 2 + 1, n1 + (odd_pos + 1) // 2))
    return graph_from_edges(n1, n2, edges)


def complete_bipartite(a: int, b: int) -> BipartiteGraph:
    return graph_from_edges(a, b, [(i, a + j) for i in range(1, a + 1) for j in range(1, b + 1)])


def k2() -> BipartiteGraph:
    return graph_from_edges(1, 1, [(1, 2)])


def canonical_cycle_matching(k: int) -> frozenset[tuple[int, int]]:
    """The matching {a_i b_i} of even_cycle(k)."""
    return frozenset((i, k + i) for i in range(1, k + 1))


def directed_cycle(n: int) -> Digraph:
    return digraph_from_arcs(n, [(i, i % n + 1) for i in range(1, n + 1)])


def bidirected_clique(n: int) -> Digraph:
    arcs = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                arcs.append((i, j))
    return digraph_from_arcs(n, arcs)


def random_bipartite_with_pm(rng: random.Random, n1: int, extra_edges: int) -> BipartiteGraph:
    """Random bipartite graph on (n1, n1) built around a planted perfect matching."""
    edges = {(i, n1 + i) for i in range(1, n1 + 1)}
    pool = [
        (i, n1 + j)
        for i in range(1, n1 + 1)
        for j in range(1, n1 + 1)
        if i != j
    ]
    rng.shuffle(pool)
    for e in pool[:extra_edges]:
        edges.add(e)
    return graph_from_edges(n1, n1, edges)


def random_digraph(rng: random.Random, n: int, arc_prob: float) -> Digraph:
    arcs = [
        (i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j and rng.random() < arc_prob
    ]
    return digraph_from_arcs(n, arcs)
