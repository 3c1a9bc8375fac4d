import random

import pytest

from matchwidth.bigraph import (
    enumerate_perfect_matchings,
    graph_from_edges,
    has_perfect_matching,
    is_extendable,
)
from matchwidth.decomp import compute_pmd
from matchwidth.errors import InvalidW, JoinConditionViolated, NotExtendable, OracleLimitExceeded
from matchwidth.linkage import (
    Itinerary,
    dapp_bruteforce,
    dapp_solve,
    dapp_solve_extending,
    is_limited,
    make_context,
    make_proxies,
    merge_guard,
    merge_join,
    node_itinerary,
    parts_in,
    w_completion,
)

from common import (
    canonical_cycle_matching,
    complete_bipartite,
    even_cycle,
    path_graph,
    random_bipartite_with_pm,
)


def test_bruteforce_examples():
    c6 = even_cycle(3)
    ok, sol = dapp_bruteforce(c6, [(1, 5)])
    assert ok and sol is not None
    assert sol.paths[0][0] == 1 and sol.paths[0][-1] == 5
    two = graph_from_edges(4, 4, [(1, 5), (1, 6), (2, 5), (2, 6), (3, 7), (3, 8), (4, 7), (4, 8)])
    assert not dapp_bruteforce(two, [(1, 7)])[0]
    c4 = even_cycle(2)
    assert dapp_bruteforce(c4, [(1, 3)])[0]


def test_bruteforce_limits():
    with pytest.raises(OracleLimitExceeded):
        dapp_bruteforce(complete_bipartite(7, 7), [(1, 8)])
    with pytest.raises(OracleLimitExceeded):
        dapp_bruteforce(even_cycle(2), [(1, 3)] * 3)


def test_w_completion_cases():
    # W pairs each terminal pair directly: nothing to add
    assert w_completion([(1, 3)], [(1, 3)]) == frozenset()
    # W matches terminals to outside vertices: one virtual closing edge
    out = w_completion([(1, 4)], [(1, 5), (2, 4)])
    assert out == frozenset({(2, 5)})
    # two pairs chained through W close a cycle on their own
    out2 = w_completion([(1, 4), (2, 5)], [(1, 5), (2, 4)])
    assert out2 == frozenset()


def test_w_completion_validation():
    with pytest.raises(InvalidW):
        w_completion([(1, 4)], [(2, 5)])  # terminals uncovered
    with pytest.raises(InvalidW):
        w_completion([(1, 4), (1, 5)], [(1, 4), (2, 5)])  # not distinct


def test_w_completion_against_solutions():
    # closing the paths of any W-extending solution through W and the
    # completion yields alternating cycles only
    c8 = even_cycle(4)
    pairs = [(1, 6)]
    for m in enumerate_perfect_matchings(c8):
        w = frozenset(e for e in m if 1 in e or 6 in e)
        if len(w) != 2:
            continue
        virt = w_completion(pairs, w)
        ok, sol = dapp_bruteforce(c8, pairs)
        assert ok
        # degree check: every vertex of paths+W+virtual has even degree in the
        # multigraph after removing matched terminal-pair edges
        deg: dict[int, int] = {}
        for u, v in list(w) + list(virt):
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        for path in sol.paths:
            for x, y in zip(path, path[1:]):
                deg[x] = deg.get(x, 0) + 1
                deg[y] = deg.get(y, 0) + 1
        # endpoints gain degree from both their W edge and their path
        assert all(v % 2 == 0 for v in deg.values())


def test_make_proxies_axioms():
    c8 = even_cycle(4)
    pairs = [(1, 6)]
    w = frozenset({(1, 5), (2, 6)})
    assert is_extendable(c8, w)
    found = list(make_proxies(c8, pairs, w))
    assert found
    for proxy, wprime in found:
        terms = [x for p in proxy for x in p]
        assert len(set(terms)) == len(terms)
        assert is_extendable(c8, w | wprime)
        covered = {x for e in wprime for x in e}
        assert all(t in covered for t in terms)
        for e in wprime:
            assert e[0] in terms or e[1] in terms


def test_make_proxies_empty_when_blocked():
    # no admissible W' exists when every neighbour is consumed by W
    c4 = even_cycle(2)
    w = frozenset({(1, 3), (2, 4)})
    assert list(make_proxies(c4, [(1, 4)], w)) == []


def test_merge_wrappers():
    c6 = even_cycle(3)
    nice = compute_pmd(c6)
    ctx = make_context(c6, nice, forced=frozenset(), banned=frozenset(), k=1)
    # locate two sibling leaves-or-subtrees to merge
    node = ctx.root_node
    c1, c2 = ctx.kids[node]
    f_x = node_itinerary(ctx, c1)
    f_y = node_itinerary(ctx, c2)
    xs, ys = ctx.below[c1], ctx.below[c2]
    has_back = any(u in ys and v in xs for u, v in c6.edges)
    if has_back:
        with pytest.raises(JoinConditionViolated):
            merge_join(f_x, f_y)
        merged = merge_guard(f_x, f_y) if len(ys) <= 2 * ctx.w else None
    else:
        merged = merge_join(f_x, f_y)
    if merged is not None:
        assert merged.node == node


def test_itinerary_root_matches_solution():
    c6 = even_cycle(3)
    nice = compute_pmd(c6)
    # forced edges covering the proxied terminals; query the root directly
    w_prime = frozenset({(2, 4), (3, 5)})
    assert is_extendable(c6, w_prime)
    ctx = make_context(c6, nice, forced=w_prime, banned=frozenset(), k=1)
    root = node_itinerary(ctx, ctx.root_node)
    got = root.query([(2, 5)], w_prime)
    assert got  # the path 2-5 exists with both anchors forced
    assert root.value(min(got), [(2, 5)], w_prime) == 1


def test_dapp_solve_examples():
    c6 = even_cycle(3)
    assert dapp_solve(c6, [(1, 5)])
    two = graph_from_edges(4, 4, [(1, 5), (1, 6), (2, 5), (2, 6), (3, 7), (3, 8), (4, 7), (4, 8)])
    assert not dapp_solve(two, [(1, 7)])
    c8 = even_cycle(4)
    assert dapp_solve(c8, [(1, 6), (3, 8)]) == dapp_bruteforce(c8, [(1, 6), (3, 8)])[0]


def test_dapp_solve_agrees_with_oracle_random():
    rng = random.Random(20240)
    checked = 0
    while checked < 120:
        n1 = rng.randint(2, 5)
        edges = set()
        for i in range(1, n1 + 1):
            for j in range(n1 + 1, 2 * n1 + 1):
                if rng.random() < rng.choice([0.3, 0.5, 0.7]):
                    edges.add((i, j))
        b = graph_from_edges(n1, n1, edges)
        if not has_perfect_matching(b):
            continue
        k = rng.choice([1, 1, 2])
        pairs = [(rng.randint(1, n1), rng.randint(n1 + 1, 2 * n1)) for _ in range(k)]
        assert dapp_solve(b, pairs) == dapp_bruteforce(b, pairs)[0]
        checked += 1


def test_dapp_extending():
    c6 = even_cycle(3)
    m = canonical_cycle_matching(3)
    # empty F equals the plain solver
    assert dapp_solve_extending(c6, [(1, 5)], frozenset()) == dapp_solve(c6, [(1, 5)])
    # full perfect matching forces internally M-conformal paths
    assert dapp_solve_extending(c6, [(1, 5)], m)
    with pytest.raises(NotExtendable):
        dapp_solve_extending(path_graph(3), [(1, 4)], [(2, 3)])


def test_dapp_extending_can_refuse():
    # forcing the other matching on C8 breaks a one-sided connection:
    # with M' = {b1a2, b2a3, b3a4, b4a1} the pair (a1, b1) has no internally
    # M'-conformal path when enough vertices are pinned
    c8 = even_cycle(4)
    other = frozenset({(2, 5), (3, 6), (4, 7), (1, 8)})
    want = False
    from matchwidth.linkage import _alternating_paths

    mate = {}
    for u, v in other:
        mate[u] = v
        mate[v] = u
    paths = list(_alternating_paths(c8, mate, 1, 5, frozenset()))
    assert dapp_solve_extending(c8, [(1, 5)], other) == bool(paths)


def test_is_limited():
    c8 = even_cycle(4)
    # single-edge paths give at most k parts
    assert is_limited(c8, [], [(1, 5)], range(1, 9), k=1, w=2)
    # adversarial system: on a 12-vertex path the unique perfect matching
    # never crosses the cut around every other matched pair, yet a single
    # path walking the whole graph visits that set in three pieces
    p12 = path_graph(11)
    walk = tuple([1, 7, 2, 8, 3, 9, 4, 10, 5, 11, 6, 12])
    assert not is_limited(p12, [], [walk], [1, 7, 3, 9, 5, 11], k=1, w=0)


def test_limited_holds_for_solution_linkages():
    rng = random.Random(5)
    for _ in range(25):
        b = random_bipartite_with_pm(rng, rng.randint(2, 4), rng.randint(0, 6))
        pairs = [(rng.randint(1, b.n1), rng.randint(b.n1 + 1, b.n))]
        ok, sol = dapp_bruteforce(b, pairs)
        if not ok:
            continue
        w = frozenset(e for e in sol.matching if any(x in e for p in pairs for x in p))
        assert is_limited(b, [], sol.paths, b.vertices, k=1, w=max(2, len(w)))
