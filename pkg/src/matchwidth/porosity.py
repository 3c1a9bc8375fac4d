"""Edge cuts, matching/cycle porosity, DM structure, and guarding sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .bigraph import (
    BipartiteGraph,
    Edge,
    Matching,
    VertexSet,
    admissible_edges,
    check_matching,
    has_perfect_matching,
    is_perfect,
)
from .digraph import Digraph, has_cycle_crossing, strong_components
from .direction import m_direction, split
from .errors import NoPerfectMatching, NotAPartialOrder, NotPerfect


# ---------------------------------------------------------------------------
# Matching porosity via min-cost perfect matching (successive shortest paths).
# ---------------------------------------------------------------------------


def _min_cost_pm_ssp(
    n: int,
    adj: Sequence[Sequence[tuple[int, int]]],
) -> list[int] | None:
    """Min-cost perfect matching by successive shortest augmenting paths.

    adj[i] lists (j, cost) pairs for row i; costs are non-negative small
    integers.  Returns mate_l (row -> column) or None when infeasible.
    Bellman-Ford-style relaxation on the residual graph keeps this simple
    and exact at desk scale.
    """
    mate_l: list[int | None] = [None] * n
    mate_r: list[int | None] = [None] * n
    big = float("inf")
    cost_of: list[dict[int, int]] = [dict(row) for row in adj]

    for _ in range(n):
        dist_l = [big] * n
        dist_r = [big] * n
        parent_r: list[int | None] = [None] * n
        for i in range(n):
            if mate_l[i] is None:
                dist_l[i] = 0
        changed = True
        while changed:
            changed = False
            for i in range(n):
                if dist_l[i] == big:
                    continue
                for j, c in adj[i]:
                    if mate_l[i] == j:
                        continue
                    nd = dist_l[i] + c
                    if nd < dist_r[j]:
                        dist_r[j] = nd
                        parent_r[j] = i
                        changed = True
                        k = mate_r[j]
                        if k is not None:
                            back = nd - cost_of[k][j]
                            if back < dist_l[k]:
                                dist_l[k] = back
            # inner loop re-runs until no relaxation fires
        free = [j for j in range(n) if mate_r[j] is None and dist_r[j] < big]
        if not free:
            return None
        end = min(free, key=lambda j: (dist_r[j], j))
        j: int | None = end
        while j is not None:
            i = parent_r[j]
            assert i is not None
            prev = mate_l[i]
            mate_l[i] = j
            mate_r[j] = i
            j = prev

    return mate_l  # type: ignore[return-value]


def _max_crossing_pm_subsets(
    n: int,
    adj_mask: Sequence[Sequence[tuple[int, int]]],
) -> list[int] | None:
    """Max-total-weight perfect matching by DP over column subsets.

    adj_mask[i] lists (j, weight).  Exact; preferred when n <= 14.
    Returns mate_l or None.
    """
    big = -1
    size = 1 << n
    best = [big] * size
    best[0] = 0
    choice: list[int] = [0] * size  # packed (i << 8) | j of the last assignment
    for mask in range(size):
        if best[mask] == big:
            continue
        i = bin(mask).count("1")
        if i == n:
            continue
        for j, w in adj_mask[i]:
            bit = 1 << j
            if mask & bit:
                continue
            nv = best[mask] + w
            if nv > best[mask | bit]:
                best[mask | bit] = nv
                choice[mask | bit] = (i << 8) | j
    full = size - 1
    if best[full] == big:
        return None
    mate_l: list[int | None] = [None] * n
    mask = full
    while mask:
        packed = choice[mask]
        i, j = packed >> 8, packed & 0xFF
        mate_l[i] = j
        mask ^= 1 << j
    return mate_l  # type: ignore[return-value]


def _porosity_with_witness(b: BipartiteGraph, shore: VertexSet) -> tuple[int, Matching]:
    """Max |M ∩ cut(shore)| over perfect matchings, with a maximising matching."""
    if b.n1 != b.n2:
        raise NoPerfectMatching("unbalanced colour classes")
    if b.n == 0:
        return 0, frozenset()
    n = b.n1
    rows = sorted(b.v1)
    cols = sorted(b.v2)
    cidx = {v: j for j, v in enumerate(cols)}
    weighted: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u, v in b.edges:
        crossing = (u in shore) != (v in shore)
        weighted[u - 1].append((cidx[v], 1 if crossing else 0))
    if n <= 14:
        mate = _max_crossing_pm_subsets(n, weighted)
    else:
        # minimise non-crossing edges instead (same optimum, costs >= 0)
        as_cost = [[(j, 1 - w) for j, w in row] for row in weighted]
        mate = _min_cost_pm_ssp(n, as_cost)
    if mate is None:
        raise NoPerfectMatching("graph has no perfect matching")
    m = frozenset((rows[i], cols[mate[i]]) for i in range(n))
    k = sum(1 for u, v in m if (u in shore) != (v in shore))
    return k, m


def matching_porosity(b: BipartiteGraph, shore: Iterable[int]) -> int:
    """Maximum number of cut edges any perfect matching uses."""
    k, _ = _porosity_with_witness(b, frozenset(shore))
    return k


def matching_porosity_bruteforce(b: BipartiteGraph, shore: Iterable[int]) -> int:
    """Porosity by enumerating all perfect matchings (test oracle)."""
    from .bigraph import enumerate_perfect_matchings

    s = frozenset(shore)
    pms = enumerate_perfect_matchings(b)
    if not pms:
        raise NoPerfectMatching("graph has no perfect matching")
    return max(sum(1 for u, v in m if (u in s) != (v in s)) for m in pms)


def cycle_porosity(d: Digraph, shore: Iterable[int]) -> int:
    """Max cut edges used by a family of pairwise disjoint directed cycles.

    Computed as the matching porosity of the corresponding conformal shore in
    the split of d.
    """
    s = frozenset(shore)
    b, m, tag = split(d)
    y = frozenset(x for v in s for x in tag[v])
    return matching_porosity(b, y)


# ---------------------------------------------------------------------------
# Elementary components and the Dulmage-Mendelsohn order.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DMStructure:
    """Elementary components together with the component order <=_i."""

    components: tuple[VertexSet, ...]
    colour_index: int | None = None
    order: frozenset[tuple[int, int]] = frozenset()  # (i, j) means comp_i <=_i comp_j

    def leq(self, i: int, j: int) -> bool:
        return (i, j) in self.order

    def component_of(self, v: int) -> int:
        for i, comp in enumerate(self.components):
            if v in comp:
                return i
        raise ValueError(f"vertex {v} in no component")


def elementary_components(b: BipartiteGraph) -> DMStructure:
    """Connected components of the subgraph induced by admissible edges."""
    if not has_perfect_matching(b):
        raise NoPerfectMatching("graph has no perfect matching")
    adm = admissible_edges(b)
    nbrs: dict[int, set[int]] = {v: set() for v in b.vertices}
    for u, v in adm:
        nbrs[u].add(v)
        nbrs[v].add(u)
    seen: set[int] = set()
    comps: list[VertexSet] = []
    for v in b.vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    comps.sort(key=min)
    return DMStructure(tuple(comps))


def dm_order(b: BipartiteGraph, colour: int) -> DMStructure:
    """Transitive-reflexive closure of the one-step order <=°_colour.

    K1 <=°_i K2 when some edge joins V_i ∩ V(K2) to V(K1) \\ V_i.  Validated
    to be antisymmetric.
    """
    if colour not in (1, 2):
        raise ValueError("colour index must be 1 or 2")
    base = elementary_components(b)
    comps = base.components
    idx = {}
    for i, comp in enumerate(comps):
        for v in comp:
            idx[v] = i
    in_colour = (lambda v: v <= b.n1) if colour == 1 else (lambda v: v > b.n1)

    step: set[tuple[int, int]] = {(i, i) for i in range(len(comps))}
    for u, v in b.edges:
        cu, cv = idx[u], idx[v]
        if cu == cv:
            continue
        for x, y in ((u, v), (v, u)):
            # x in V_i ∩ K2, y in V(K1) minus V_i:  K1 <=° K2
            if in_colour(x) and not in_colour(y):
                step.add((idx[y], idx[x]))
    # transitive closure (Floyd-Warshall style over the small component set)
    n = len(comps)
    reach = [[False] * n for _ in range(n)]
    for i, j in step:
        reach[i][j] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    closure = frozenset((i, j) for i in range(n) for j in range(n) if reach[i][j])
    for i, j in closure:
        if i != j and (j, i) in closure:
            raise NotAPartialOrder(f"components {i} and {j} are mutually comparable")
    return DMStructure(comps, colour, closure)


def linearise_dm(structure: DMStructure) -> list[int]:
    """Deterministic topological order of the components consistent with <=_i.

    Minimal elements first; ties broken by the lowest vertex id.
    """
    n = len(structure.components)
    preds: dict[int, set[int]] = {i: set() for i in range(n)}
    for i, j in structure.order:
        if i != j:
            preds[j].add(i)
    placed: list[int] = []
    remaining = set(range(n))
    while remaining:
        ready = [i for i in remaining if preds[i] <= set(placed)]
        ready.sort(key=lambda i: min(structure.components[i]))
        nxt = ready[0]
        placed.append(nxt)
        remaining.remove(nxt)
    return placed


# ---------------------------------------------------------------------------
# Guarding sets (constructive).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GuardingSet:
    edges: Matching
    shore: VertexSet
    porosity: int

    def __iter__(self):
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def _induced_bipartite(b: BipartiteGraph, keep: VertexSet) -> tuple[BipartiteGraph, dict[int, int], dict[int, int]]:
    """Induced subgraph on keep with dense renumbering; returns maps both ways."""
    blacks = sorted(v for v in keep if v <= b.n1)
    whites = sorted(v for v in keep if v > b.n1)
    fwd: dict[int, int] = {}
    for i, v in enumerate(blacks, start=1):
        fwd[v] = i
    for i, v in enumerate(whites, start=len(blacks) + 1):
        fwd[v] = i
    back = {i: v for v, i in fwd.items()}
    edges = frozenset(
        (fwd[u], fwd[v]) for u, v in b.edges if u in keep and v in keep
    )
    return BipartiteGraph(len(blacks), len(whites), edges), fwd, back


def _crossing_conformal_cycle_exists(
    b: BipartiteGraph,
    m_edges: Iterable[Edge],
    shore: VertexSet,
    allowed: VertexSet,
) -> bool:
    """Is there an M-conformal cycle inside `allowed` crossing the shore cut?

    m_edges must pair up the allowed vertices among themselves.  Decided by
    strong connectivity of the induced M-direction: a crossing cycle exists
    iff some strong component holds matching edges from both sides.
    """
    inside = [e for e in m_edges if e[0] in allowed and e[1] in allowed]
    index = {e: i + 1 for i, e in enumerate(inside)}
    by_v1 = {e[0]: e for e in inside}
    by_v2 = {e[1]: e for e in inside}
    arcs = set()
    for u, v in b.edges:
        if u not in allowed or v not in allowed:
            continue
        e = by_v1.get(u)
        f = by_v2.get(v)
        if e is None or f is None or e == f:
            continue
        arcs.add((index[e], index[f]))
    d = Digraph(len(inside), frozenset(arcs))
    side = {index[e]: (e[0] in shore) for e in inside}
    for comp in strong_components(d):
        if len(comp) < 2:
            continue
        flags = {side[v] for v in comp}
        if len(flags) == 2:
            return True
    return False


def guarding_set(b: BipartiteGraph, m: Matching, shore: Iterable[int]) -> GuardingSet:
    """A guard F ⊆ M for the cut around the shore, |F| <= 2k + k².

    Constructive: start from the crossing matching edges, add the cover of a
    porosity-maximising matching, then walk the linearised component order
    and cut off minimal dangerous configurations with pairs of lambda-cuts.
    """
    m = check_matching(b, m)
    if not is_perfect(b, m):
        raise NotPerfect("m is not a perfect matching")
    shore = frozenset(shore)
    k = matching_porosity(b, shore)

    f_start = frozenset(e for e in m if (e[0] in shore) != (e[1] in shore))
    removed0 = frozenset(x for e in f_start for x in e)
    keep0 = frozenset(b.vertices) - removed0
    if not keep0:
        return GuardingSet(f_start, shore, k)
    b0, fwd, back = _induced_bipartite(b, keep0)
    shore0 = frozenset(fwd[v] for v in shore if v in fwd)
    m0 = frozenset((fwd[u], fwd[v]) for u, v in m if u in keep0 and v in keep0)
    if not b0.cut(shore0):
        return GuardingSet(f_start, shore, k)

    k0, m_max = _porosity_with_witness(b0, shore0)
    if k0 == 0:
        return GuardingSet(f_start, shore, k)
    w_edges = frozenset(e for e in m_max if (e[0] in shore0) != (e[1] in shore0))
    w_vertices = frozenset(x for e in w_edges for x in e)
    f0 = frozenset(e for e in m0 if e[0] in w_vertices or e[1] in w_vertices)

    # elementary components of b0 - V(W) in the lambda order of <=_2
    keep1 = frozenset(b0.vertices) - w_vertices
    b1, fwd1, back1 = _induced_bipartite(b0, keep1)
    structure = dm_order(b1, 2)
    lam = linearise_dm(structure)
    comps_b0 = [frozenset(back1[v] for v in structure.components[i]) for i in lam]

    w_v1 = frozenset(e[0] for e in w_edges)
    mcover_vertices = frozenset(x for e in f0 for x in e)
    boxes = [comp - mcover_vertices for comp in comps_b0]

    picked: list[frozenset[Edge]] = []
    removed = set(mcover_vertices)
    last = 0  # 1-based index of the last dangerous endpoint handled
    ell = len(comps_b0)
    while True:
        hit = None
        allowed: set[int] = set()
        for j in range(ell):
            allowed |= boxes[j] - removed
            if j + 1 <= last:
                continue
            if _crossing_conformal_cycle_exists(b0, m0, shore0, frozenset(allowed)):
                hit = j + 1
                break
        if hit is None:
            break
        f_p: set[Edge] = set()
        for idx in (hit - 1, hit):
            prefix = set(w_v1)
            for j in range(idx):
                prefix |= comps_b0[j]
            f_p |= {e for e in m0 if (e[0] in prefix) != (e[1] in prefix)}
        picked.append(frozenset(f_p))
        removed |= {x for e in f_p for x in e}
        last = hit

    guard0 = set(f0)
    for f_p in picked:
        guard0 |= f_p
    guard = set(f_start)
    guard |= {(back[u], back[v]) for u, v in guard0}

    # greedy reduction: drop edges (crossing ones excepted) while the guard
    # property survives; deterministic order, bound can only improve
    for e in sorted(guard - f_start):
        trial = frozenset(guard - {e})
        removed_v = frozenset(x for f in trial for x in f)
        if not _crossing_conformal_cycle_exists(
            b, m, shore, frozenset(b.vertices) - removed_v
        ):
            guard.remove(e)
    return GuardingSet(frozenset(guard), shore, k)


def verify_guard(
    b: BipartiteGraph,
    m: Matching,
    shore: Iterable[int],
    guard: Iterable[Edge],
) -> bool:
    """Check the guard contract: contains the crossing matching edges and hits
    every M-conformal cycle that crosses the cut."""
    m = check_matching(b, m)
    if not is_perfect(b, m):
        raise NotPerfect("m is not a perfect matching")
    shore = frozenset(shore)
    guard = frozenset(guard)
    if not guard <= m:
        return False
    crossing = frozenset(e for e in m if (e[0] in shore) != (e[1] in shore))
    if not crossing <= guard:
        return False
    removed = frozenset(x for e in guard for x in e)
    allowed = frozenset(b.vertices) - removed
    return not _crossing_conformal_cycle_exists(b, m, shore, allowed)


def verify_guard_bruteforce(
    b: BipartiteGraph,
    m: Matching,
    shore: Iterable[int],
    guard: Iterable[Edge],
) -> bool:
    """Guard check against the exhaustive conformal-cycle enumeration."""
    from .direction import conformal_cycles

    m = check_matching(b, m)
    shore = frozenset(shore)
    guard = frozenset(guard)
    if not guard <= m:
        return False
    crossing = frozenset(e for e in m if (e[0] in shore) != (e[1] in shore))
    if not crossing <= guard:
        return False
    guard_vertices = {x for e in guard for x in e}
    for cyc in conformal_cycles(b, m):
        verts = set(cyc)
        edges = set()
        for i, u in enumerate(cyc):
            v = cyc[(i + 1) % len(cyc)]
            edges.add((min(u, v), max(u, v)))
        crosses = any((u in shore) != (v in shore) for u, v in edges)
        if crosses and not (verts & guard_vertices):
            return False
    return True


def directed_cycle_hitting_set(d: Digraph, shore: Iterable[int]) -> VertexSet:
    """Vertices whose removal kills every directed cycle crossing the cut.

    Size at most k² + 2k for k the cycle porosity, via the guarding set of
    the split.
    """
    s = frozenset(shore)
    b, m, tag = split(d)
    y = frozenset(x for v in s for x in tag[v])
    guard = guarding_set(b, m, y)
    edge_to_vertex = {e: v for v, e in tag.items()}
    return frozenset(edge_to_vertex[e] for e in guard.edges)
