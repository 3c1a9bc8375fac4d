"""Counting perfect matchings: brute-force oracle and the decomposition DP."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .bigraph import (
    BipartiteGraph,
    Edge,
    Graph,
    Matching,
)
from .decomp import LeafTree, NicePMD, compute_pmd
from .errors import InvalidDecomposition, NoPerfectMatching, OracleLimitExceeded

COUNT_ORACLE_LIMIT = 22


def count_pm_bruteforce(g: Graph | BipartiteGraph, limit: int = COUNT_ORACLE_LIMIT) -> int:
    """Exact number of perfect matchings (exhaustive, arbitrary precision).

    For bipartite inputs this equals the permanent of the biadjacency matrix.
    """
    if g.n > limit:
        raise OracleLimitExceeded(f"{g.n} vertices exceeds oracle limit {limit}")
    if g.n % 2:
        return 0
    if isinstance(g, BipartiteGraph):
        if g.n1 != g.n2:
            return 0
        # permanent by DP over subsets of the white class
        n = g.n1
        masks = [0] * (n + 1)
        for u, v in g.edges:
            masks[u] |= 1 << (v - g.n1 - 1)
        counts = {0: 1}
        for u in range(1, n + 1):
            nxt: dict[int, int] = {}
            row = masks[u]
            for mask, c in counts.items():
                free = row & ~mask
                while free:
                    bit = free & -free
                    free ^= bit
                    key = mask | bit
                    nxt[key] = nxt.get(key, 0) + c
            counts = nxt
        return counts.get((1 << n) - 1, 0)

    verts = list(g.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    nbrs = [[idx[w] for w in g.adj[v]] for v in verts]
    full = (1 << len(verts)) - 1
    memo: dict[int, int] = {full: 1}

    def rec(mask: int) -> int:
        got = memo.get(mask)
        if got is not None:
            return got
        i = (~mask & -~mask).bit_length() - 1
        total = 0
        for j in nbrs[i]:
            if not mask & (1 << j):
                total += rec(mask | (1 << i) | (1 << j))
        memo[mask] = total
        return total

    return rec(0)


@dataclass
class CountStats:
    """Operation counters backing the runtime-envelope assertions."""

    extendability_checks: int = 0
    table_entries: int = 0
    boundary_sets: int = 0


def count_pm_decomp(
    g: Graph | BipartiteGraph,
    dec: LeafTree,
    width: int | None = None,
    stats: CountStats | None = None,
) -> int:
    """Number of perfect matchings via the decomposition dynamic program.

    mu(t, F) counts the perfect matchings of the graph induced by the leaves
    below t together with the endpoints of the boundary matching F that
    contain F; joins sum over matchings in the shared middle cut.  Works for
    general graphs (desk scale).
    """
    dec.validate(g.vertices)
    if stats is None:
        stats = CountStats()
    adj = g.adj
    bipartite = isinstance(g, BipartiteGraph)

    if dec.m == 1:
        return 1 if g.n == 0 else 0
    if dec.m == 2:
        u, v = sorted(dec.leaf_map.values())
        return 1 if (min(u, v), max(u, v)) in g.edges else 0

    # root the tree: prefer the designated root when internal, else pick one
    root = dec.root
    if root is None or root in dec.leaf_map:
        internal = [x for x in range(dec.m) if x not in dec.leaf_map]
        root = internal[0]

    parent: dict[int, int | None] = {root: None}
    order = [root]
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for y in dec.adj[x]:
            if y != parent[x]:
                parent[y] = x
                order.append(y)

    below: dict[int, frozenset[int]] = {}
    for x in reversed(order):
        if x in dec.leaf_map:
            below[x] = frozenset({dec.leaf_map[x]})
        else:
            acc: set[int] = set()
            for y in dec.adj[x]:
                if y != parent[x]:
                    acc |= below[y]
            below[x] = frozenset(acc)

    def boundary_edges(x: int) -> list[Edge]:
        s = below[x]
        return sorted(e for e in g.edges if (e[0] in s) != (e[1] in s))

    cap = g.n // 2 if width is None else width

    memo: dict[tuple[int, frozenset[Edge]], int] = {}

    def mu(t: int, f: frozenset[Edge]) -> int:
        key = (t, f)
        got = memo.get(key)
        if got is not None:
            return got
        stats.table_entries += 1
        if t in dec.leaf_map:
            v = dec.leaf_map[t]
            if len(f) == 1:
                (e,) = f
                result = 1 if v in e else 0
            else:
                result = 0
            memo[key] = result
            return result
        kids = [y for y in dec.adj[t] if y != parent[t]]
        assert len(kids) == 2
        t1, t2 = kids
        cut1 = set(boundary_edges(t1))
        cut2 = set(boundary_edges(t2))
        mid = sorted(cut1 & cut2)
        f1 = frozenset(e for e in f if e in cut1)
        f2 = frozenset(e for e in f if e in cut2)
        covered = {x for e in f for x in e}
        total = 0
        # enumerate matchings w in the middle cut compatible with f
        def walk(idx: int, chosen: list[Edge], used: set[int]) -> None:
            nonlocal total
            w = frozenset(chosen)
            stats.boundary_sets += 1
            left = mu(t1, f1 | w)
            if left:
                total += left * mu(t2, f2 | w)
            if len(chosen) >= cap:
                return
            for j in range(idx, len(mid)):
                e = mid[j]
                if e[0] in used or e[1] in used or e[0] in covered or e[1] in covered:
                    continue
                chosen.append(e)
                used.update(e)
                walk(j + 1, chosen, used)
                chosen.pop()
                used.difference_update(e)

        walk(0, [], set())
        memo[key] = total
        return total

    kids = [y for y in dec.adj[root] if parent.get(y) == root]
    if len(kids) == 2:
        t1, t2 = kids
        cut = sorted(e for e in g.edges if (e[0] in below[t1]) != (e[1] in below[t1]))
        total = 0

        def walk_root(idx: int, chosen: list[Edge], used: set[int]) -> None:
            nonlocal total
            f = frozenset(chosen)
            left = mu(t1, f)
            if left:
                total += left * mu(t2, f)
            if len(chosen) >= cap:
                return
            for j in range(idx, len(cut)):
                e = cut[j]
                if e[0] in used or e[1] in used:
                    continue
                chosen.append(e)
                used.update(e)
                walk_root(j + 1, chosen, used)
                chosen.pop()
                used.difference_update(e)

        walk_root(0, [], set())
        return total

    assert len(kids) == 3
    t1, t2, t3 = kids
    cut1 = sorted(boundary_edges(t1))
    mid23 = sorted(set(boundary_edges(t2)) & set(boundary_edges(t3)))
    total = 0

    def walk_w(idx: int, f: list[Edge], chosen: list[Edge], used: set[int]) -> None:
        nonlocal total
        ff = frozenset(f)
        w = frozenset(chosen)
        f2 = frozenset(e for e in ff if (e[0] in below[t2]) != (e[1] in below[t2]))
        f3 = frozenset(e for e in ff if (e[0] in below[t3]) != (e[1] in below[t3]))
        a = mu(t1, ff)
        if a:
            b = mu(t2, f2 | w)
            if b:
                total += a * b * mu(t3, f3 | w)
        if len(chosen) >= cap:
            return
        for j in range(idx, len(mid23)):
            e = mid23[j]
            if e[0] in used or e[1] in used:
                continue
            chosen.append(e)
            used.update(e)
            walk_w(j + 1, f, chosen, used)
            chosen.pop()
            used.difference_update(e)

    def walk_f(idx: int, f: list[Edge], used: set[int]) -> None:
        walk_w(0, f, [], set(used))
        if len(f) >= cap:
            return
        for j in range(idx, len(cut1)):
            e = cut1[j]
            if e[0] in used or e[1] in used:
                continue
            f.append(e)
            used.update(e)
            walk_f(j + 1, f, used)
            f.pop()
            used.difference_update(e)

    walk_f(0, [], set())
    return total


def count_pm(
    b: BipartiteGraph,
    dec: LeafTree | None = None,
    dtw_limit: int | None = None,
) -> int:
    """Count perfect matchings through the decomposition pipeline."""
    if dec is None:
        kwargs = {} if dtw_limit is None else {"dtw_limit": dtw_limit}
        nice = compute_pmd(b, **kwargs)
        dec = nice.tree
        width = nice.width
    else:
        width = None
    return count_pm_decomp(b, dec, width=width)
