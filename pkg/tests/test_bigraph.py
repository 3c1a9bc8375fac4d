import pytest
from hypothesis import given, settings, strategies as st

from matchwidth.bigraph import (
    BipartiteGraph,
    admissible_edges,
    bicontract,
    enumerate_perfect_matchings,
    graph_from_edges,
    has_perfect_matching,
    is_conformal,
    is_extendable,
    is_matching_covered,
    plain_has_perfect_matching,
    some_perfect_matching,
    Graph,
)
from matchwidth.errors import DegreeNotTwo, OracleLimitExceeded
from matchwidth.isomorphism import bipartite_isomorphic

from common import canonical_cycle_matching, complete_bipartite, even_cycle, k2, path_graph


def test_has_pm_basics():
    assert has_perfect_matching(even_cycle(2))  # C4
    assert has_perfect_matching(k2())
    star = graph_from_edges(1, 3, [(1, 2), (1, 3), (1, 4)])
    assert not has_perfect_matching(star)


def test_enumerate_counts():
    assert len(enumerate_perfect_matchings(even_cycle(2))) == 2
    assert len(enumerate_perfect_matchings(complete_bipartite(3, 3))) == 6
    assert len(enumerate_perfect_matchings(k2())) == 1


def test_enumerate_order_and_dedup():
    pms = enumerate_perfect_matchings(complete_bipartite(3, 3))
    keys = [tuple(sorted(m)) for m in pms]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_enumerate_limits():
    with pytest.raises(OracleLimitExceeded):
        enumerate_perfect_matchings(complete_bipartite(13, 13))
    with pytest.raises(OracleLimitExceeded):
        enumerate_perfect_matchings(complete_bipartite(4, 4), cap=3)


def test_extendable():
    c6 = even_cycle(3)
    for e in c6.edges:
        assert is_extendable(c6, [e])
    p4 = path_graph(3)
    # the middle edge of the path is not extendable
    mid = next(e for e in p4.edges if e == (2, 3))
    assert not is_extendable(p4, [mid])
    assert is_extendable(c6, [])


def test_conformal():
    c4 = even_cycle(2)
    # two adjacent vertices leave a K2
    assert is_conformal(c4, [1, 3])
    # both V1 vertices leave two isolated white vertices
    assert not is_conformal(c4, [1, 2])
    assert is_conformal(c4, [])


def test_admissible():
    c6 = even_cycle(3)
    assert admissible_edges(c6) == c6.edges
    p4 = path_graph(3)
    assert admissible_edges(p4) == frozenset({(1, 3), (2, 4)})
    k33 = complete_bipartite(3, 3)
    assert admissible_edges(k33) == k33.edges


def test_matching_covered():
    assert is_matching_covered(even_cycle(3))
    assert not is_matching_covered(path_graph(3))
    two_c4 = graph_from_edges(
        4, 4, [(1, 5), (1, 6), (2, 5), (2, 6), (3, 7), (3, 8), (4, 7), (4, 8)]
    )
    assert not is_matching_covered(two_c4)


def test_bicontract_on_cycles():
    c6 = even_cycle(3)
    smaller, _, _ = bicontract(c6, 1)
    assert bipartite_isomorphic(smaller, even_cycle(2))
    c4 = even_cycle(2)
    tiny, _, _ = bicontract(c4, 4)
    assert bipartite_isomorphic(tiny, k2())
    p4 = path_graph(3)
    inner, _, _ = bicontract(p4, 3)
    assert bipartite_isomorphic(inner, k2())


def test_bicontract_requires_degree_two():
    k33 = complete_bipartite(3, 3)
    with pytest.raises(DegreeNotTwo):
        bicontract(k33, 1)


def test_bicontract_preserves_pm_existence():
    graphs = [even_cycle(2), even_cycle(3), even_cycle(4), path_graph(5)]
    for b in graphs:
        for v in b.vertices:
            if b.degree(v) != 2:
                continue
            image, _, _ = bicontract(b, v)
            assert has_perfect_matching(image) == has_perfect_matching(b)


def test_extendable_matches_enumeration():
    for b in [even_cycle(2), even_cycle(3), path_graph(5), complete_bipartite(3, 3)]:
        pms = enumerate_perfect_matchings(b)
        for e in sorted(b.edges):
            by_enum = any(e in m for m in pms)
            assert is_extendable(b, [e]) == by_enum


def test_admissible_is_union_of_pms():
    for b in [even_cycle(3), path_graph(5), complete_bipartite(2, 2)]:
        pms = enumerate_perfect_matchings(b)
        union = frozenset(e for m in pms for e in m)
        assert admissible_edges(b) == union


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.data())
def test_random_graphs_pm_consistency(n1, data):
    # random sub-square graphs: HK existence agrees with brute enumeration
    all_pairs = [(i, n1 + j) for i in range(1, n1 + 1) for j in range(1, n1 + 1)]
    picked = data.draw(st.lists(st.sampled_from(all_pairs), max_size=14, unique=True))
    b = graph_from_edges(n1, n1, picked)
    pms = enumerate_perfect_matchings(b)
    assert has_perfect_matching(b) == (len(pms) > 0)
    m = some_perfect_matching(b)
    assert (m is not None) == (len(pms) > 0)
    if m is not None:
        assert m in pms


def test_plain_pm_matches_bipartite():
    for b in [even_cycle(2), even_cycle(3), path_graph(3), complete_bipartite(3, 3)]:
        g = Graph(b.n, b.edges)
        assert plain_has_perfect_matching(g) == has_perfect_matching(b)
    triangle = Graph(3, frozenset({(1, 2), (2, 3), (1, 3)}))
    assert not plain_has_perfect_matching(triangle)
    k4 = Graph(4, frozenset({(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}))
    assert plain_has_perfect_matching(k4)
