import random

import pytest

from matchwidth.bigraph import Graph, graph_from_edges
from matchwidth.counting import CountStats, count_pm, count_pm_bruteforce, count_pm_decomp
from matchwidth.decomp import compute_pmd, pmw_exact_small
from matchwidth.errors import OracleLimitExceeded
from matchwidth.grids import cylindrical_grid, square_grid

from common import complete_bipartite, even_cycle, k2, path_graph, random_bipartite_with_pm


def domino_tilings(rows: int, cols: int) -> int:
    """Independent recomputation: broken-profile DP over grid cells."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def rec(cell: int, profile: int) -> int:
        if cell == rows * cols:
            return 1 if profile == 0 else 0
        r, c = divmod(cell, cols)
        if profile & 1:
            return rec(cell + 1, profile >> 1)
        total = 0
        # vertical domino down
        if r + 1 < rows:
            total += rec(cell + 1, (profile >> 1) | (1 << (cols - 1)))
        # horizontal domino right
        if c + 1 < cols and not (profile >> 1) & 1:
            total += rec(cell + 2, profile >> 2 if cols >= 2 else 0)
        return total

    if rows * cols % 2:
        return 0
    return rec(0, 0)


def test_bruteforce_counts():
    assert count_pm_bruteforce(even_cycle(2)) == 2
    assert count_pm_bruteforce(even_cycle(9)) == 2
    assert count_pm_bruteforce(complete_bipartite(3, 3)) == 6
    assert count_pm_bruteforce(k2()) == 1
    assert count_pm_bruteforce(path_graph(3)) == 1
    triangle = Graph(3, frozenset({(1, 2), (2, 3), (1, 3)}))
    assert count_pm_bruteforce(triangle) == 0
    k4 = Graph(4, frozenset({(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}))
    assert count_pm_bruteforce(k4) == 3


def test_bruteforce_limit():
    with pytest.raises(OracleLimitExceeded):
        count_pm_bruteforce(complete_bipartite(12, 12))


def test_grid_counts_match_domino_dp():
    for rows, cols in ((2, 2), (2, 3), (2, 4), (4, 4), (3, 4)):
        g = square_grid(rows, cols)
        assert count_pm_bruteforce(g) == domino_tilings(rows, cols)
    assert domino_tilings(4, 4) == 36


def test_decomp_count_small():
    for b in (even_cycle(2), even_cycle(3), even_cycle(4), complete_bipartite(3, 3)):
        w, dec = pmw_exact_small(b)
        assert count_pm_decomp(b, dec, width=w) == count_pm_bruteforce(b)


def test_decomp_count_via_pipeline():
    for b in (even_cycle(2), even_cycle(3), complete_bipartite(3, 3), square_grid(2, 4)):
        assert count_pm(b) == count_pm_bruteforce(b)


def test_decomp_count_nonbipartite():
    k4 = Graph(4, frozenset({(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}))
    from matchwidth.decomp import LeafTree

    tree = LeafTree(
        (
            frozenset({4}),
            frozenset({4}),
            frozenset({5}),
            frozenset({5}),
            frozenset({0, 1, 5}),
            frozenset({2, 3, 4}),
        ),
        {0: 1, 1: 2, 2: 3, 3: 4},
    )
    assert count_pm_decomp(k4, tree) == 3


def test_decomp_count_random_agreement():
    rng = random.Random(19)
    for _ in range(40):
        b = random_bipartite_with_pm(rng, rng.randint(1, 5), rng.randint(0, 9))
        nice = compute_pmd(b)
        assert count_pm_decomp(b, nice.tree, width=nice.width) == count_pm_bruteforce(b)


def test_count_invariant_across_decompositions():
    b = even_cycle(3)
    w, d1 = pmw_exact_small(b)
    nice = compute_pmd(b)
    assert count_pm_decomp(b, d1, width=w) == count_pm_decomp(b, nice.tree, width=nice.width)


def test_cg2_count_frozen():
    b, _, _ = cylindrical_grid(2)
    value = count_pm_bruteforce(b)
    # frozen regression constant: permanent DP and full enumeration both give 9
    from matchwidth.bigraph import enumerate_perfect_matchings

    assert len(enumerate_perfect_matchings(b)) == value == 9
    assert count_pm(b, dtw_limit=12) == 9


def test_stats_envelope():
    b = even_cycle(4)
    w, dec = pmw_exact_small(b)
    stats = CountStats()
    count_pm_decomp(b, dec, width=w, stats=stats)
    n = b.n
    envelope = n ** (4 * w + 1)
    assert stats.table_entries <= envelope
    assert stats.boundary_sets <= envelope
