"""Bipartite graphs, matchings, conformality, extendability, bicontraction.

Vertices are dense 1-based integers: the black class V1 is [1..n1] and the
white class V2 is [n1+1..n1+n2].  Edges are stored as pairs (u, v) with
u in V1 and v in V2.  All graph values are immutable; every operation is a
pure function, so concurrent use on shared graphs is safe.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator

from .errors import (
    DegreeNotTwo,
    InvalidMatching,
    NoPerfectMatching,
    OracleLimitExceeded,
)

Edge = tuple[int, int]
Matching = frozenset[Edge]
VertexSet = frozenset[int]

ORACLE_VERTEX_LIMIT = 24


def _norm_edge(u: int, v: int, n1: int) -> Edge:
    if u > v:
        u, v = v, u
    if not (1 <= u <= n1 < v):
        raise ValueError(f"edge ({u},{v}) does not join V1 to V2")
    return (u, v)


@dataclass(frozen=True)
class BipartiteGraph:
    """Simple bipartite graph with colour classes V1 = [1..n1], V2 = [n1+1..n1+n2]."""

    n1: int
    n2: int
    edges: Matching = frozenset()

    def __post_init__(self) -> None:
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("negative class size")
        norm = frozenset(_norm_edge(u, v, self.n1) for u, v in self.edges)
        for u, v in norm:
            if v > self.n1 + self.n2:
                raise ValueError(f"vertex {v} out of range")
        object.__setattr__(self, "edges", norm)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def v1(self) -> range:
        return range(1, self.n1 + 1)

    @property
    def v2(self) -> range:
        return range(self.n1 + 1, self.n1 + self.n2 + 1)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def colour(self, v: int) -> int:
        return 1 if v <= self.n1 else 2

    @cached_property
    def adj(self) -> dict[int, frozenset[int]]:
        nbrs: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return {v: frozenset(s) for v, s in nbrs.items()}

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self.edges

    def edge(self, u: int, v: int) -> Edge:
        if u > v:
            u, v = v, u
        if (u, v) not in self.edges:
            raise ValueError(f"({u},{v}) is not an edge")
        return (u, v)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = {1}
        queue = deque([1])
        while queue:
            x = queue.popleft()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == self.n

    def cut(self, shore: Iterable[int]) -> frozenset[Edge]:
        """Edge cut around the shore: edges with exactly one endpoint inside."""
        s = set(shore)
        return frozenset(e for e in self.edges if (e[0] in s) != (e[1] in s))


def graph_from_edges(n1: int, n2: int, pairs: Iterable[tuple[int, int]]) -> BipartiteGraph:
    return BipartiteGraph(n1, n2, frozenset(tuple(p) for p in pairs))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices [1..n], not necessarily bipartite."""

    n: int
    edges: frozenset[Edge] = frozenset()

    def __post_init__(self) -> None:
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError("loops are not allowed")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u},{v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def adj(self) -> dict[int, frozenset[int]]:
        nbrs: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return {v: frozenset(s) for v, s in nbrs.items()}


def as_plain_graph(b: BipartiteGraph) -> Graph:
    return Graph(b.n, b.edges)


# ---------------------------------------------------------------------------
# Maximum matching (augmenting-path / Hopcroft-Karp) -- the single primitive
# behind all perfect-matching existence and extendability checks.
# ---------------------------------------------------------------------------


def max_matching(b: BipartiteGraph, banned: frozenset[int] = frozenset()) -> dict[int, int]:
    """Maximum matching of b minus the banned vertices, as a map V1 -> V2."""
    left = [u for u in b.v1 if u not in banned]
    adj = {u: sorted(v for v in b.adj[u] if v not in banned) for u in left}
    pair_u: dict[int, int] = {}
    pair_v: dict[int, int] = {}
    inf = float("inf")

    def bfs() -> bool:
        dist: dict[int, float] = {}
        queue: deque[int] = deque()
        for u in left:
            if u not in pair_u:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= found:
                continue
            for v in adj[u]:
                w = pair_v.get(v)
                if w is None:
                    found = min(found, dist[u] + 1)
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        self_dist.clear()
        self_dist.update(dist)
        return found != inf

    self_dist: dict[int, float] = {}

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = pair_v.get(v)
            if w is None or (self_dist.get(w) == self_dist[u] + 1 and dfs(w)):
                pair_u[u] = v
                pair_v[v] = u
                return True
        self_dist[u] = inf
        return False

    while bfs():
        for u in left:
            if u not in pair_u:
                dfs(u)
    return pair_u


def has_perfect_matching(b: BipartiteGraph, banned: frozenset[int] = frozenset()) -> bool:
    """True iff b minus the banned vertices has a perfect matching."""
    left = sum(1 for u in b.v1 if u not in banned)
    right = sum(1 for v in b.v2 if v not in banned)
    if left != right:
        return False
    return len(max_matching(b, banned)) == left


def some_perfect_matching(b: BipartiteGraph, banned: frozenset[int] = frozenset()) -> Matching | None:
    """A perfect matching of b minus banned, or None.  Deterministic."""
    left = sum(1 for u in b.v1 if u not in banned)
    right = sum(1 for v in b.v2 if v not in banned)
    if left != right:
        return None
    pair = max_matching(b, banned)
    if len(pair) != left:
        return None
    return frozenset((u, v) for u, v in pair.items())


def check_matching(b: BipartiteGraph, f: Iterable[Edge]) -> Matching:
    """Validate that f is a matching in b; returns it normalised."""
    edges = frozenset(_norm_edge(u, v, b.n1) for u, v in f)
    covered: set[int] = set()
    for u, v in edges:
        if (u, v) not in b.edges:
            raise InvalidMatching(f"({u},{v}) is not an edge of the host graph")
        if u in covered or v in covered:
            raise InvalidMatching("edges are not pairwise disjoint")
        covered.update((u, v))
    return edges


def is_perfect(b: BipartiteGraph, m: Iterable[Edge]) -> bool:
    m = frozenset(m)
    return len(m) * 2 == b.n and len({x for e in m for x in e}) == b.n


def enumerate_perfect_matchings(
    b: BipartiteGraph,
    cap: int | None = None,
    limit: int = ORACLE_VERTEX_LIMIT,
) -> list[Matching]:
    """All perfect matchings, ordered lexicographically by sorted edge list.

    Brute-force oracle; refuses graphs above the vertex limit and raises
    OracleLimitExceeded when more than cap matchings exist.
    """
    if b.n > limit:
        raise OracleLimitExceeded(f"{b.n} vertices exceeds oracle limit {limit}")
    if b.n1 != b.n2:
        return []
    out: list[Matching] = []
    used: set[int] = set()
    chosen: list[Edge] = []

    def rec(i: int) -> None:
        if i > b.n1:
            out.append(frozenset(chosen))
            if cap is not None and len(out) > cap:
                raise OracleLimitExceeded(f"more than {cap} perfect matchings")
            return
        for v in sorted(b.adj[i]):
            if v not in used:
                used.add(v)
                chosen.append((i, v))
                rec(i + 1)
                chosen.pop()
                used.remove(v)

    rec(1)
    return out


def is_extendable(b: BipartiteGraph, f: Iterable[Edge]) -> bool:
    """True iff some perfect matching of b contains the matching f."""
    edges = check_matching(b, f)
    banned = frozenset(x for e in edges for x in e)
    return has_perfect_matching(b, banned)


def is_conformal(b: BipartiteGraph, x: Iterable[int]) -> bool:
    """True iff b minus the vertex set x still has a perfect matching."""
    return has_perfect_matching(b, frozenset(x))


def admissible_edges(b: BipartiteGraph) -> frozenset[Edge]:
    """Edges contained in at least one perfect matching (empty if no PM)."""
    if not has_perfect_matching(b):
        return frozenset()
    return frozenset(
        e for e in b.edges if has_perfect_matching(b, frozenset(e))
    )


def is_matching_covered(b: BipartiteGraph) -> bool:
    """Connected and every edge admissible."""
    if b.n == 0 or not b.is_connected():
        return False
    return admissible_edges(b) == b.edges and len(b.edges) > 0


def enumerate_matchings_of_size(b: BipartiteGraph, k: int) -> Iterator[Matching]:
    """All matchings with exactly k edges (test helper, small graphs only)."""
    for combo in combinations(sorted(b.edges), k):
        covered: set[int] = set()
        ok = True
        for u, v in combo:
            if u in covered or v in covered:
                ok = False
                break
            covered.update((u, v))
        if ok:
            yield frozenset(combo)


def bicontract(b: BipartiteGraph, v: int) -> tuple[BipartiteGraph, dict[int, int], int]:
    """Contract the degree-2 vertex v with both of its neighbours.

    Returns (new graph, old-id -> new-id map for surviving vertices, id of
    the contraction vertex).  Parallel edges are merged silently.
    """
    if not (1 <= v <= b.n):
        raise ValueError(f"no vertex {v}")
    nbrs = sorted(b.adj[v])
    if len(nbrs) != 2:
        raise DegreeNotTwo(f"vertex {v} has degree {len(nbrs)}")
    v1_, v2_ = nbrs
    removed = {v, v1_, v2_}
    new_colour = b.colour(v1_)  # the contraction vertex takes the neighbours' colour

    survivors_black = [x for x in b.v1 if x not in removed]
    survivors_white = [x for x in b.v2 if x not in removed]
    if new_colour == 1:
        survivors_black.append(0)  # placeholder for the new vertex, appended last
    else:
        survivors_white.append(0)
    n1_new = len(survivors_black)
    n2_new = len(survivors_white)

    mapping: dict[int, int] = {}
    new_vertex = -1
    for i, x in enumerate(survivors_black, start=1):
        if x == 0:
            new_vertex = i
        else:
            mapping[x] = i
    for i, x in enumerate(survivors_white, start=n1_new + 1):
        if x == 0:
            new_vertex = i
        else:
            mapping[x] = i

    merged_nbrs = (b.adj[v1_] | b.adj[v2_]) - removed
    new_edges: set[Edge] = set()
    for u, w in b.edges:
        if u in removed or w in removed:
            continue
        a, c = mapping[u], mapping[w]
        new_edges.add((min(a, c), max(a, c)))
    for x in merged_nbrs:
        a, c = mapping[x], new_vertex
        new_edges.add((min(a, c), max(a, c)))
    return BipartiteGraph(n1_new, n2_new, frozenset(new_edges)), mapping, new_vertex


# ---------------------------------------------------------------------------
# Exhaustive helpers for general graphs (counting module support).
# ---------------------------------------------------------------------------


def plain_has_perfect_matching(g: Graph, banned: frozenset[int] = frozenset()) -> bool:
    """PM existence in a general graph; memoised recursion, desk scale only."""
    verts = [v for v in g.vertices if v not in banned]
    if len(verts) % 2:
        return False
    idx = {v: i for i, v in enumerate(verts)}
    nbrs = [[idx[w] for w in g.adj[v] if w not in banned] for v in verts]
    full = (1 << len(verts)) - 1
    memo: dict[int, bool] = {}

    def rec(mask: int) -> bool:
        if mask == full:
            return True
        got = memo.get(mask)
        if got is not None:
            return got
        i = (~mask & -~mask).bit_length() - 1
        res = False
        for j in nbrs[i]:
            if not mask & (1 << j):
                if rec(mask | (1 << i) | (1 << j)):
                    res = True
                    break
        memo[mask] = res
        return res

    return rec(0)
