"""Exhaustive small-graph corpora for the acceptance suite.

Connected bipartite graphs with a perfect matching on (n, n) vertices are
enumerated up to isomorphism by generating one representative per multiset
of V1 neighbourhood masks and deduplicating with a permutation canonical
form (cheap at n <= 5).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement, permutations

from matchwidth.bigraph import BipartiteGraph, graph_from_edges

_PERMS = {n: list(permutations(range(n))) for n in range(1, 6)}


def _pm_exists(rows: tuple[int, ...]) -> bool:
    n = len(rows)
    full = (1 << n) - 1

    @lru_cache(maxsize=None)
    def rec(i: int, used: int) -> bool:
        if i == n:
            return True
        free = rows[i] & ~used
        while free:
            bit = free & -free
            free ^= bit
            if rec(i + 1, used | bit):
                return True
        return False

    out = rec(0, 0)
    rec.cache_clear()
    return out


def _connected(rows: tuple[int, ...]) -> bool:
    n = len(rows)
    # BFS over V1 ∪ V2 encoded as (left mask, right mask)
    left = 1
    right = 0
    while True:
        new_right = right
        for i in range(n):
            if left >> i & 1:
                new_right |= rows[i]
        new_left = left
        for i in range(n):
            if rows[i] & new_right:
                new_left |= 1 << i
        if new_left == left and new_right == right:
            break
        left, right = new_left, new_right
    return left == (1 << n) - 1 and right == (1 << n) - 1


def _canon(rows: tuple[int, ...]) -> tuple[int, ...]:
    """Canonical form: columns are laid out in ascending-degree blocks and
    permuted within each block; the minimum sorted row tuple over these
    layouts (and of the transpose) is isomorphism-invariant and complete."""
    from itertools import product

    n = len(rows)

    def remap_best(rs: tuple[int, ...]) -> tuple[int, ...]:
        degs = [sum(r >> j & 1 for r in rs) for j in range(n)]
        classes: dict[int, list[int]] = {}
        for j, d in enumerate(degs):
            classes.setdefault(d, []).append(j)
        groups = [classes[d] for d in sorted(classes)]
        # block of target positions per degree class, ascending degree
        blocks: list[list[int]] = []
        start = 0
        for g in groups:
            blocks.append(list(range(start, start + len(g))))
            start += len(g)
        best = None
        for combo in product(*(permutations(blk) for blk in blocks)):
            perm = [0] * n
            for g, targets in zip(groups, combo):
                for src, dst in zip(g, targets):
                    perm[src] = dst
            out = []
            for r in rs:
                m = 0
                for j in range(n):
                    if r >> j & 1:
                        m |= 1 << perm[j]
                out.append(m)
            out.sort()
            t = tuple(out)
            if best is None or t < best:
                best = t
        return best  # type: ignore[return-value]

    cols = [0] * n
    for i, r in enumerate(rows):
        for j in range(n):
            if r >> j & 1:
                cols[j] |= 1 << i
    a = remap_best(tuple(sorted(rows)))
    b = remap_best(tuple(sorted(cols)))
    return min(a, b)


def _rows_to_graph(rows: tuple[int, ...]) -> BipartiteGraph:
    n = len(rows)
    edges = [
        (i + 1, n + j + 1)
        for i in range(n)
        for j in range(n)
        if rows[i] >> j & 1
    ]
    return graph_from_edges(n, n, edges)


def connected_pm_bipartite(n: int) -> list[BipartiteGraph]:
    """All connected bipartite graphs on (n, n) with a perfect matching,
    one representative per isomorphism class."""
    if n == 0:
        return []
    masks = [m for m in range(1, 1 << n)]
    seen: set[tuple[int, ...]] = set()
    out: list[BipartiteGraph] = []
    for combo in combinations_with_replacement(masks, n):
        rows = tuple(combo)
        if not _pm_exists(rows):
            continue
        if not _connected(rows):
            continue
        key = _canon(rows)
        if key in seen:
            continue
        seen.add(key)
        out.append(_rows_to_graph(rows))
    return out


def graph_automorphism_orbits(b: BipartiteGraph, items: list) -> list:
    """One representative per orbit of the colour-preserving-or-swapping
    automorphism action on the given items (tuples of vertices)."""
    n = b.n1
    rows = [0] * n
    for u, v in b.edges:
        rows[u - 1] |= 1 << (v - b.n1 - 1)
    autos: list[dict[int, int]] = []
    for p1 in _PERMS[n]:
        for p2 in _PERMS[n]:
            ok = True
            for i in range(n):
                m = 0
                r = rows[i]
                for j in range(n):
                    if r >> j & 1:
                        m |= 1 << p2[j]
                if m != rows[p1[i]]:
                    ok = False
                    break
            if ok:
                mapping = {u: p1[u - 1] + 1 for u in range(1, n + 1)}
                for v in range(n + 1, 2 * n + 1):
                    mapping[v] = n + p2[v - n - 1] + 1
                autos.append(mapping)
    reps = []
    seen: set = set()
    for item in items:
        if tuple(item) in seen:
            continue
        reps.append(item)
        for a in autos:
            image = tuple(a[x] for x in item)
            seen.add(image)
    return reps
