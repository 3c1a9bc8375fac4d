"""Simple digraphs with the standard reachability/SCC toolbox."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

Arc = tuple[int, int]


@dataclass(frozen=True)
class Digraph:
    """Simple digraph on vertices [1..n]; antiparallel arc pairs allowed."""

    n: int
    arcs: frozenset[Arc] = frozenset()

    def __post_init__(self) -> None:
        for u, v in self.arcs:
            if u == v:
                raise ValueError("loops are not allowed")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"arc ({u},{v}) out of range")
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def out_adj(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.arcs:
            out[u].add(v)
        return {v: frozenset(s) for v, s in out.items()}

    @cached_property
    def in_adj(self) -> dict[int, frozenset[int]]:
        inn: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.arcs:
            inn[v].add(u)
        return {v: frozenset(s) for v, s in inn.items()}

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs


def digraph_from_arcs(n: int, pairs: Iterable[tuple[int, int]]) -> Digraph:
    return Digraph(n, frozenset(tuple(p) for p in pairs))


def strong_components(d: Digraph, banned: frozenset[int] = frozenset()) -> list[frozenset[int]]:
    """SCCs of d minus banned, in reverse topological order (Tarjan, iterative)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[frozenset[int]] = []
    counter = 0

    for root in d.vertices:
        if root in banned or root in index:
            continue
        work: list[tuple[int, Iterator[int]]] = [(root, iter(sorted(d.out_adj[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w in banned:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(d.out_adj[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.remove(w)
                    comp.add(w)
                    if w == v:
                        break
                sccs.append(frozenset(comp))
    return sccs


def is_strongly_connected(d: Digraph, banned: frozenset[int] = frozenset()) -> bool:
    verts = [v for v in d.vertices if v not in banned]
    if not verts:
        return False
    return len(strong_components(d, banned)) == 1


def reachable_from(d: Digraph, sources: Iterable[int], banned: frozenset[int] = frozenset()) -> frozenset[int]:
    seen = {s for s in sources if s not in banned}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for y in d.out_adj[x]:
            if y not in banned and y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def is_strongly_k_connected(d: Digraph, k: int) -> bool:
    """Strong k-connectivity: |V| >= k+1 and no cutset of fewer than k vertices."""
    if d.n < k + 1:
        return False
    from itertools import combinations

    for size in range(0, k):
        for cut in combinations(d.vertices, size):
            if not is_strongly_connected(d, frozenset(cut)):
                return False
    return True


def simple_directed_cycles(d: Digraph, banned: frozenset[int] = frozenset()) -> list[tuple[int, ...]]:
    """All simple directed cycles, each rooted at its minimal vertex (test helper)."""
    cycles: list[tuple[int, ...]] = []
    verts = sorted(v for v in d.vertices if v not in banned)

    def dfs(start: int, v: int, path: list[int], visited: set[int]) -> None:
        for w in sorted(d.out_adj[v]):
            if w in banned or w < start:
                continue
            if w == start:
                cycles.append(tuple(path))
            elif w not in visited:
                visited.add(w)
                path.append(w)
                dfs(start, w, path, visited)
                path.pop()
                visited.remove(w)

    for s in verts:
        dfs(s, s, [s], {s})
    return cycles


def has_cycle_crossing(d: Digraph, shore: frozenset[int], banned: frozenset[int] = frozenset()) -> bool:
    """True iff some directed cycle of d - banned has vertices on both sides of shore."""
    for comp in strong_components(d, banned):
        if any(v in shore for v in comp) and any(v not in shore for v in comp):
            return True
    return False
