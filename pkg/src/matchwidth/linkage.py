"""The bipartite k-disjoint alternating paths problem: brute-force oracle,
W-completions, proxies, itineraries, and the merge DP over decompositions.

A solution for terminal pairs (s_i, t_i) is a perfect matching M together
with pairwise disjoint (shared endpoints allowed only at shared terminals)
internally M-conformal paths joining the pairs.  The dynamic program works
bottom-up over a rooted perfect matching decomposition; partial certificates
are local matchings M_loc with prescribed cut behaviour plus path segments,
merged at every internal node by enumerating the interface structure
(matching crossings R, path crossings H with their anchor edges, bounces,
terminal landings).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .bigraph import (
    BipartiteGraph,
    Edge,
    Matching,
    check_matching,
    graph_from_edges,
    has_perfect_matching,
    is_extendable,
    some_perfect_matching,
)
from .decomp import LeafTree, NicePMD, compute_pmd, dtw_exact_small, prepare_dtd, dtd_to_nice_pmd
from .direction import m_direction
from .errors import (
    BoundViolated,
    InvalidW,
    JoinConditionViolated,
    NotExtendable,
    OracleLimitExceeded,
)
from .porosity import matching_porosity

DAPP_VERTEX_LIMIT = 12
DAPP_PAIR_LIMIT = 2

TerminalPair = tuple[int, int]


@dataclass(frozen=True)
class Solution:
    matching: Matching
    paths: tuple[tuple[int, ...], ...]


def _pairs_ok(b: BipartiteGraph, pairs: Sequence[TerminalPair]) -> None:
    for s, t in pairs:
        if not (1 <= s <= b.n1 < t <= b.n):
            raise ValueError(f"terminal pair ({s},{t}) must join V1 to V2")


def _paths_disjoint(paths: Sequence[tuple[int, ...]], pairs: Sequence[TerminalPair]) -> bool:
    for i in range(len(paths)):
        for j in range(i + 1, len(paths)):
            shared = set(paths[i]) & set(paths[j])
            allowed = ({pairs[i][0], pairs[i][1]} & {pairs[j][0], pairs[j][1]})
            if not shared <= allowed:
                return False
            ends_i = {paths[i][0], paths[i][-1]}
            ends_j = {paths[j][0], paths[j][-1]}
            if not shared <= (ends_i & ends_j):
                return False
    return True


def _alternating_paths(
    b: BipartiteGraph,
    mate: dict[int, int],
    s: int,
    t: int,
    blocked: frozenset[int],
) -> Iterator[tuple[int, ...]]:
    """All internally M-conformal s-t paths avoiding blocked vertices.

    Any such path is s, y1, M(y1), y2, M(y2), ..., t (internal vertices come
    in matching pairs), or the bare edge st.
    """
    if b.has_edge(s, t):
        yield (s, t)
    path = [s]
    used = {s, t}

    def rec() -> Iterator[tuple[int, ...]]:
        x = path[-1]
        for y in sorted(b.adj[x]):
            if y in used or y in blocked or mate.get(x) == y:
                continue
            partner = mate.get(y)
            if partner is None or partner in used or partner in blocked:
                continue
            path.extend((y, partner))
            used.update((y, partner))
            if b.has_edge(partner, t):
                yield tuple(path) + (t,)
            yield from rec()
            used.difference_update((y, partner))
            del path[-2:]

    yield from rec()


def dapp_bruteforce(
    b: BipartiteGraph,
    pairs: Sequence[TerminalPair],
    limit: int = DAPP_VERTEX_LIMIT,
    pair_limit: int = DAPP_PAIR_LIMIT,
    banned: frozenset[int] = frozenset(),
) -> tuple[bool, Solution | None]:
    """Exhaustive oracle over perfect matchings and path systems."""
    if b.n > limit:
        raise OracleLimitExceeded(f"{b.n} vertices exceeds oracle limit {limit}")
    if len(pairs) > pair_limit:
        raise OracleLimitExceeded(f"{len(pairs)} pairs exceed oracle limit {pair_limit}")
    pairs = [tuple(p) for p in pairs]
    _pairs_ok(b, pairs)
    if any(s in banned or t in banned for s, t in pairs):
        return False, None
    from .bigraph import enumerate_perfect_matchings

    for m in enumerate_perfect_matchings(b):
        mate: dict[int, int] = {}
        for u, v in m:
            mate[u] = v
            mate[v] = u

        def try_pairs(idx: int, chosen: list[tuple[int, ...]], used: frozenset[int]) -> Solution | None:
            if idx == len(pairs):
                return Solution(m, tuple(chosen))
            s, t = pairs[idx]
            # vertices shared with earlier paths are allowed only at shared terminals
            share = frozenset(
                x
                for p, q in pairs[:idx]
                for x in (p, q)
                if x in (s, t)
            )
            if (frozenset({s, t}) & used) - share:
                return None
            blocked = banned | (used - share)
            for path in _alternating_paths(b, mate, s, t, blocked):
                got = try_pairs(idx + 1, chosen + [path], used | frozenset(path))
                if got is not None:
                    return got
            return None

        sol = try_pairs(0, [], frozenset())
        if sol is not None:
            return True, sol
    return False, None


# ---------------------------------------------------------------------------
# W-completions and proxies.
# ---------------------------------------------------------------------------


def w_completion(
    pairs: Sequence[TerminalPair], w: Iterable[Edge]
) -> frozenset[tuple[int, int]]:
    """Virtual edges closing the alternating chains through W (Lemma-style
    linear trace); together with W and any W-extending solution's paths they
    induce alternating cycles only."""
    pairs = [tuple(p) for p in pairs]
    w = frozenset(tuple(e) for e in w)
    mate_w: dict[int, int] = {}
    for u, v in w:
        if u in mate_w or v in mate_w:
            raise InvalidW("w is not a matching")
        mate_w[u] = v
        mate_w[v] = u
    terminals = {x for p in pairs for x in p}
    if not terminals <= set(mate_w):
        raise InvalidW("w must cover every terminal")
    for u, v in w:
        if u not in terminals and v not in terminals:
            raise InvalidW("every edge of w must cover a terminal")
    pair_of_s = {s: i for i, (s, t) in enumerate(pairs)}
    pair_of_t = {t: i for i, (s, t) in enumerate(pairs)}
    if len(pair_of_s) != len(pairs) or len(pair_of_t) != len(pairs):
        raise InvalidW("terminal pairs must be distinct")

    completed: set[int] = set()
    virtual: set[tuple[int, int]] = set()
    for start in range(len(pairs)):
        if start in completed:
            continue
        completed.add(start)
        # walk forward from s-side through w
        i = start
        dangling_s: int | None = None
        while True:
            s_i = pairs[i][0]
            x = mate_w[s_i]
            if x == pairs[i][1]:
                break  # w pairs the terminals directly: chain closes
            if x in pair_of_t:
                j = pair_of_t[x]
                if j in completed:
                    break  # returned to the starting pair: cycle closed
                completed.add(j)
                i = j
                continue
            dangling_s = x
            break
        if dangling_s is None:
            continue
        # walk from the t-side of the starting pair
        i = start
        dangling_t: int | None = None
        while True:
            t_i = pairs[i][1]
            y = mate_w[t_i]
            if y in pair_of_s:
                j = pair_of_s[y]
                if j in completed:
                    break
                completed.add(j)
                i = j
                continue
            dangling_t = y
            break
        if dangling_t is None:
            continue
        virtual.add((dangling_t, dangling_s) if dangling_t < dangling_s else (dangling_s, dangling_t))
    if len(virtual) > len(pairs):
        raise AssertionError("completion exceeded the pair count")
    return frozenset(virtual)


def make_proxies(
    b: BipartiteGraph,
    pairs: Sequence[TerminalPair],
    w: Matching,
    banned: frozenset[int] = frozenset(),
) -> Iterator[tuple[tuple[TerminalPair, ...], Matching]]:
    """All (proxy pair family, W') choices satisfying the proxy axioms."""
    pairs = [tuple(p) for p in pairs]
    w = frozenset(tuple(e) for e in w)
    w_vertices = frozenset(x for e in w for x in e)
    s_terms = {s for s, _ in pairs}
    t_terms = {t for _, t in pairs}

    def choices_s(s: int) -> list[tuple[int, int]]:
        out = []
        for y in sorted(b.adj[s]):
            if y in w_vertices or y in banned:
                continue
            for z in sorted(b.adj[y]):
                if z == s or z in w_vertices or z in banned or z in s_terms:
                    continue
                out.append((z, y))  # proxy terminal z covered by edge (z, y)
        return out

    def choices_t(t: int) -> list[tuple[int, int]]:
        out = []
        for v in sorted(b.adj[t]):
            if v in w_vertices or v in banned:
                continue
            for q in sorted(b.adj[v]):
                if q == t or q in w_vertices or q in banned or q in t_terms:
                    continue
                out.append((q, v))  # proxy terminal q covered by edge (v, q)
        return out

    def rec(idx: int, proxy: list[TerminalPair], wprime: set[Edge], used: set[int]) -> Iterator:
        if idx == len(pairs):
            if is_extendable(b, w | frozenset(wprime)):
                yield tuple(proxy), frozenset(wprime)
            return
        s, t = pairs[idx]
        for z, y in choices_s(s):
            if z in used or y in used:
                continue
            e1 = (min(z, y), max(z, y))
            # collapsed proxy: one edge covers both proxy terminals
            # (arises from solution paths with exactly two inner vertices)
            if z in b.adj[t]:
                proxy.append((z, y))
                wprime.add(e1)
                used.update((z, y))
                yield from rec(idx + 1, proxy, wprime, used)
                used.difference_update((z, y))
                wprime.discard(e1)
                proxy.pop()
            for q, v in choices_t(t):
                if q in used or v in used or len({z, y, q, v}) < 4:
                    continue
                e2 = (min(v, q), max(v, q))
                proxy.append((z, q))
                wprime.update((e1, e2))
                used.update((z, y, q, v))
                yield from rec(idx + 1, proxy, wprime, used)
                used.difference_update((z, y, q, v))
                wprime.difference_update((e1, e2))
                proxy.pop()

    yield from rec(0, [], set(), set())


# ---------------------------------------------------------------------------
# The itinerary dynamic program over a rooted decomposition.
# ---------------------------------------------------------------------------


@dataclass
class _Ctx:
    """Shared state of one DP run: host graph, forced matching edges, banned
    path vertices, pair/width budgets, and the binarised decomposition tree."""

    b: BipartiteGraph
    forced: Matching
    banned: frozenset[int]
    k: int
    w: int
    below: list[frozenset[int]]
    kids: list[tuple[int, ...]]
    root_node: int
    memo: dict = field(default_factory=dict)

    def edges_between(self, xs: frozenset[int], ys: frozenset[int]) -> list[Edge]:
        return sorted(
            e
            for e in self.b.edges
            if (e[0] in xs and e[1] in ys) or (e[0] in ys and e[1] in xs)
        )


def _binarise(tree: LeafTree) -> tuple[list[frozenset[int]], list[tuple[int, ...]], int]:
    """Rooted binary DP tree: below-sets and children lists; a ternary root
    is folded into a virtual extra node."""
    root = tree.root
    if root is None or root in tree.leaf_map:
        internal = [x for x in range(tree.m) if x not in tree.leaf_map]
        if not internal:
            # a bare matching edge: synthesise the joining node
            a, bb = (tree.leaf_map[x] for x in sorted(tree.leaf_map))
            return (
                [frozenset({a}), frozenset({bb}), frozenset({a, bb})],
                [(), (), (0, 1)],
                2,
            )
        root = internal[0]
    parent: dict[int, int | None] = {root: None}
    order = [root]
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for y in tree.adj[x]:
            if y != parent[x]:
                parent[y] = x
                order.append(y)
    below: list[frozenset[int]] = [frozenset()] * tree.m
    kids: list[tuple[int, ...]] = [()] * tree.m
    for x in reversed(order):
        if x in tree.leaf_map:
            below[x] = frozenset({tree.leaf_map[x]})
        else:
            cs = tuple(y for y in tree.adj[x] if y != parent[x])
            kids[x] = cs
            acc: set[int] = set()
            for y in cs:
                acc |= below[y]
            below[x] = frozenset(acc)
    if len(kids[root]) == 3:
        c1, c2, c3 = kids[root]
        virtual = len(below)
        below = below + [below[c2] | below[c3]]
        kids = kids + [(c2, c3)]
        kids[root] = (c1, virtual)
    return below, kids, root


def _query(ctx: _Ctx, node: int, u_set: frozenset[Edge], pairs: tuple[TerminalPair, ...], j_set: frozenset[Edge]) -> frozenset[int]:
    """Achievable linkage sizes for the itinerary entry (node, U, pairs, J).

    Semantics: a perfect matching M_loc of the subgraph induced by the node's
    vertex set plus the outer endpoints of U, with M_loc crossing the cut
    exactly at U and containing J (and the forced edges), together with
    disjoint pair-joining paths inside the node's vertex set, internally
    M_loc-conformal, avoiding banned vertices and J-endpoints (terminals
    excepted).
    """
    key = (node, u_set, pairs, j_set)
    got = ctx.memo.get(key)
    if got is not None:
        return got
    ctx.memo[key] = frozenset()  # progress marker; recursion is acyclic

    xs = ctx.below[node]
    result: set[int] = set()

    terminals = [x for p in pairs for x in p]
    ok = (
        len(set(terminals)) == len(terminals)
        and all(x in xs and x not in ctx.banned for x in terminals)
        and len(pairs) <= ctx.k + ctx.w
        and len(u_set) <= ctx.w
        and u_set <= j_set
    )
    if ok:
        cover: dict[int, Edge] = {}
        for e in j_set:
            for x in e:
                if x in cover:
                    ok = False
                cover[x] = e
        ok = ok and all(x in cover for x in terminals)
    if ok:
        for e in ctx.forced:
            inside = (e[0] in xs) + (e[1] in xs)
            if inside and e not in j_set:
                ok = False
                break
    if not ok:
        ctx.memo[key] = frozenset()
        return frozenset()

    if not ctx.kids[node]:
        (v,) = xs
        if not pairs and len(u_set) == 1 and j_set == u_set:
            (e,) = u_set
            if v in e:
                result.add(0)
        ctx.memo[key] = frozenset(result)
        return frozenset(result)

    c1, c2 = ctx.kids[node]
    out = _merge(ctx, c1, c2, u_set, pairs, j_set)
    ctx.memo[key] = out
    return out


def _matchings_within(
    edges: list[Edge], must: frozenset[Edge], avoid: frozenset[int], cap: int
) -> Iterator[frozenset[Edge]]:
    """Matchings made of the given edges, containing must, avoiding the
    vertex set avoid, with at most cap edges."""
    must_v = {x for e in must for x in e}
    if any(x in avoid for x in must_v) or len(must) > cap:
        return
    pool = [e for e in edges if e not in must and not (set(e) & must_v) and not (set(e) & avoid)]

    def rec(idx: int, chosen: list[Edge], used: set[int]) -> Iterator[frozenset[Edge]]:
        yield frozenset(chosen) | must
        if len(chosen) + len(must) >= cap:
            return
        for i in range(idx, len(pool)):
            e = pool[i]
            if e[0] in used or e[1] in used:
                continue
            chosen.append(e)
            used.update(e)
            yield from rec(i + 1, chosen, used)
            chosen.pop()
            used.difference_update(e)

    yield from rec(0, [], set())


def _merge(
    ctx: _Ctx,
    c1: int,
    c2: int,
    u_set: frozenset[Edge],
    pairs: tuple[TerminalPair, ...],
    j_set: frozenset[Edge],
) -> frozenset[int]:
    b = ctx.b
    xs, ys = ctx.below[c1], ctx.below[c2]
    both = xs | ys
    xy_edges = ctx.edges_between(xs, ys)

    u_x_base = frozenset(e for e in u_set if (e[0] in xs) != (e[1] in xs))
    u_y_base = frozenset(e for e in u_set if (e[0] in ys) != (e[1] in ys))
    j_internal = j_set - u_set
    j_cross = frozenset(
        e for e in j_internal if (e[0] in xs) != (e[1] in xs)
    )
    forced_cross = frozenset(
        e for e in ctx.forced if ((e[0] in xs) and (e[1] in ys)) or ((e[0] in ys) and (e[1] in xs))
    )
    must_r = j_cross | forced_cross
    terminals = frozenset(x for p in pairs for x in p)
    blocked_v = {x for e in (j_set | ctx.forced) for x in e}

    results: set[int] = set()
    cap_r = ctx.w - max(len(u_x_base), len(u_y_base))
    if cap_r < len(must_r):
        return frozenset()

    avoid_for_r = frozenset(
        x for e in (u_set | j_set | ctx.forced) for x in e
    ) - {x for e in must_r for x in e}

    for r_set in _matchings_within(xy_edges, must_r, avoid_for_r, ctx.w):
        if len(u_x_base | r_set) > ctx.w or len(u_y_base | r_set) > ctx.w:
            continue
        u_x = u_x_base | r_set
        u_y = u_y_base | r_set
        for ell in _routes(ctx, c1, c2, u_x, u_y, r_set, pairs, j_set):
            results.add(ell)
    return frozenset(results)


def _routes(
    ctx: _Ctx,
    c1: int,
    c2: int,
    u_x: frozenset[Edge],
    u_y: frozenset[Edge],
    r_set: frozenset[Edge],
    pairs: tuple[TerminalPair, ...],
    j_set: frozenset[Edge],
) -> Iterator[int]:
    """Enumerate interface structures (path crossings with anchors and the
    routes of every pair through them), query the children, and yield the
    achievable total linkage sizes."""
    b = ctx.b
    xs, ys = ctx.below[c1], ctx.below[c2]
    side_of = {}
    for x in xs:
        side_of[x] = 0
    for y in ys:
        side_of[y] = 1
    terminals = frozenset(x for p in pairs for x in p)
    j_vertices = frozenset(x for e in (j_set | ctx.forced | r_set) for x in e)
    r_v1 = {e[0]: e for e in r_set}
    r_v2 = {e[1]: e for e in r_set}

    xy_free = [
        e
        for e in ctx.edges_between(xs, ys)
        if e not in r_set
        and e[0] not in ctx.banned
        and e[1] not in ctx.banned
        and (e[0] in terminals or e[0] in r_v1 or e[0] not in j_vertices)
        and (e[1] in terminals or e[1] in r_v2 or e[1] not in j_vertices)
    ]

    # crossing usage is bounded: every crossing ends a part on each side
    max_h = ctx.k + ctx.w

    def anchor_options(vertex: int, want_v1_end: bool) -> list[Edge | None]:
        """Anchor matching edges covering an H endpoint, or None markers for
        terminal/bounce covers."""
        side = side_of[vertex]
        opts: list[Edge | None] = []
        if vertex in terminals:
            opts.append(None)
            return opts
        if want_v1_end and vertex in r_v1:
            opts.append(None)
            return opts
        if not want_v1_end and vertex in r_v2:
            opts.append(None)
            return opts
        if vertex in j_vertices:
            return []
        pool = xs if side == 0 else ys
        for other in sorted(b.adj[vertex]):
            if other not in pool or other in j_vertices or other in ctx.banned:
                continue
            e = (min(vertex, other), max(vertex, other))
            opts.append(e)
        return opts

    h_candidates = xy_free

    def enumerate_h(idx: int, chosen: list[tuple[Edge, Edge | None, Edge | None]], used_v: set[int]) -> Iterator:
        yield list(chosen)
        if len(chosen) >= max_h:
            return
        for i in range(idx, len(h_candidates)):
            h = h_candidates[i]
            w_end, z_end = h  # V1 endpoint, V2 endpoint
            if w_end in used_v or z_end in used_v:
                continue
            for ta in anchor_options(w_end, want_v1_end=True):
                ta_vs = set(ta) - {w_end} if ta else set()
                if ta_vs & used_v:
                    continue
                for ha in anchor_options(z_end, want_v1_end=False):
                    ha_vs = set(ha) - {z_end} if ha else set()
                    if ha_vs & used_v or (ta and ha and set(ta) & set(ha)):
                        continue
                    chosen.append((h, ta, ha))
                    added = {w_end, z_end} | ta_vs | ha_vs
                    used_v.update(added)
                    yield from enumerate_h(i + 1, chosen, used_v)
                    used_v.difference_update(added)
                    chosen.pop()

    for h_struct in enumerate_h(0, [], set()):
        yield from _assemble(ctx, c1, c2, u_x, u_y, r_set, pairs, j_set, h_struct)


def _assemble(
    ctx,
    c1: int,
    c2: int,
    u_x: frozenset[Edge],
    u_y: frozenset[Edge],
    r_set: frozenset[Edge],
    pairs: tuple[TerminalPair, ...],
    j_set: frozenset[Edge],
    h_struct: list[tuple[Edge, Edge | None, Edge | None]],
) -> Iterator[int]:
    """Route every pair through the chosen interface structure.

    Aux nodes are sources S_i, sinks T_i, matching crossings R_e, and path
    crossings H.  Segment arcs between an out-port (a V1 vertex) and an
    in-port (a V2 vertex) on the same side become child terminal pairs;
    wiring arcs (terminal starts/landings and bounces through R endpoints)
    consume their vertex at this level.
    """
    b = ctx.b
    xs, ys = ctx.below[c1], ctx.below[c2]
    terminals = frozenset(x for p in pairs for x in p)

    def side(v: int) -> int:
        return 0 if v in xs else 1

    S = [("s", i) for i in range(len(pairs))]
    T = [("t", i) for i in range(len(pairs))]
    R = {e: ("r", e) for e in sorted(r_set)}
    H = {idx: ("h", idx) for idx in range(len(h_struct))}
    h_nodes = set(H.values())

    out_port: dict[tuple, tuple[int, int]] = {}
    in_port: dict[tuple, tuple[int, int]] = {}
    wiring: dict[tuple, list[tuple[tuple, int]]] = {}  # node -> [(target, consumed vertex)]

    terminal_node: dict[int, tuple] = {}
    for i, (s, t) in enumerate(pairs):
        out_port[S[i]] = (side(s), s)
        in_port[T[i]] = (side(t), t)
        terminal_node[s] = S[i]
        terminal_node[t] = T[i]

    for e, node in R.items():
        v1e, v2e = e
        if v1e not in terminals and v2e not in terminals:
            out_port[node] = (side(v1e), v1e)
            in_port[node] = (side(v2e), v2e)

    ok = True
    for idx, (h, ta, ha) in enumerate(h_struct):
        node = H[idx]
        w_end, z_end = h
        if ta is not None:
            u_anchor = ta[1] if ta[0] == w_end else ta[0]
            in_port[node] = (side(w_end), u_anchor)
        elif w_end in terminal_node and terminal_node[w_end][0] == "s":
            wiring.setdefault(terminal_node[w_end], []).append((node, w_end))
        elif w_end in {e[0] for e in r_set}:
            e = next(e for e in r_set if e[0] == w_end)
            if e[0] in terminals or e[1] in terminals:
                ok = False
                break
            wiring.setdefault(R[e], []).append((node, w_end))
        else:
            ok = False
            break
        if ha is not None:
            v_anchor = ha[0] if ha[1] == z_end else ha[1]
            out_port[node] = (side(z_end), v_anchor)
        elif z_end in terminal_node and terminal_node[z_end][0] == "t":
            wiring.setdefault(node, []).append((terminal_node[z_end], z_end))
        elif z_end in {e[1] for e in r_set}:
            e = next(e for e in r_set if e[1] == z_end)
            if e[0] in terminals or e[1] in terminals:
                ok = False
                break
            wiring.setdefault(node, []).append((R[e], z_end))
        else:
            ok = False
            break
    if not ok:
        return

    direct_edge: dict[int, Edge] = {}
    for i, (s, t) in enumerate(pairs):
        e = (min(s, t), max(s, t))
        if e in r_set and e in j_set:
            direct_edge[i] = e

    sinks_by_side: dict[int, list[tuple]] = {0: [], 1: []}
    for node, ip in in_port.items():
        sinks_by_side[ip[0]].append(node)

    used_nodes: set[tuple] = set()
    used_verts: set[int] = set()
    seg_x: list[TerminalPair] = []
    seg_y: list[TerminalPair] = []
    extra_holder = [0]

    def advance(cur: tuple, tnode: tuple) -> Iterator[None]:
        if cur == tnode:
            yield None
            return
        op = out_port.get(cur)
        if op is not None:
            sd, a = op
            if a not in used_verts and a not in ctx.banned:
                seg_list = seg_x if sd == 0 else seg_y
                for nxt in sinks_by_side[sd]:
                    if nxt[0] == "t" and nxt != tnode:
                        continue
                    if nxt in used_nodes:
                        continue
                    bvert = in_port[nxt][1]
                    if bvert in used_verts or bvert in ctx.banned:
                        continue
                    if len(seg_list) >= ctx.k + ctx.w:
                        continue
                    used_nodes.add(nxt)
                    used_verts.update((a, bvert))
                    seg_list.append((a, bvert))
                    yield from advance(nxt, tnode)
                    seg_list.pop()
                    used_verts.difference_update((a, bvert))
                    used_nodes.discard(nxt)
        for nxt, consumed in wiring.get(cur, ()):  # terminal starts/landings, bounces
            if nxt in used_nodes or consumed in used_verts or consumed in ctx.banned:
                continue
            if nxt[0] == "t" and nxt != tnode:
                continue
            used_nodes.add(nxt)
            used_verts.add(consumed)
            yield from advance(nxt, tnode)
            used_verts.discard(consumed)
            used_nodes.discard(nxt)

    def route_pair(i: int) -> Iterator[None]:
        snode, tnode = S[i], T[i]
        if i in direct_edge:
            e = direct_edge[i]
            node = R[e]
            if node not in used_nodes and not (set(e) & used_verts):
                used_nodes.add(node)
                used_verts.update(e)
                extra_holder[0] += 2
                yield None
                extra_holder[0] -= 2
                used_verts.difference_update(e)
                used_nodes.discard(node)
        used_nodes.add(snode)
        yield from advance(snode, tnode)
        used_nodes.discard(snode)

    def route_all(i: int) -> Iterator[None]:
        if i == len(pairs):
            if h_nodes <= used_nodes:
                yield None
            return
        for _ in route_pair(i):
            yield from route_all(i + 1)

    j_internal = j_set - u_x - u_y - r_set
    j_x = frozenset(e for e in j_internal if e[0] in xs and e[1] in xs)
    j_y = frozenset(e for e in j_internal if e[0] in ys and e[1] in ys)
    anchors_x = frozenset(
        a
        for (h, ta, ha) in h_struct
        for a in (ta, ha)
        if a is not None and a[0] in xs and a[1] in xs
    )
    anchors_y = frozenset(
        a
        for (h, ta, ha) in h_struct
        for a in (ta, ha)
        if a is not None and a[0] in ys and a[1] in ys
    )

    seen: set[tuple] = set()
    for _ in route_all(0):
        sig = (tuple(sorted(seg_x)), tuple(sorted(seg_y)), extra_holder[0])
        if sig in seen:
            continue
        seen.add(sig)
        qx = _query(ctx, c1, u_x, sig[0], j_x | anchors_x | u_x)
        if not qx:
            continue
        qy = _query(ctx, c2, u_y, sig[1], j_y | anchors_y | u_y)
        if not qy:
            continue
        extra = extra_holder[0] + 2 * len(h_struct)
        for lx in qx:
            for ly in qy:
                yield lx + ly + extra


# ---------------------------------------------------------------------------
# Public itinerary surface and the merge wrappers.
# ---------------------------------------------------------------------------


@dataclass
class Itinerary:
    """Sparse lazy itinerary: entries are computed on demand and memoised.

    f(ell, pairs, J) = 1 iff a linkage of total size ell with a local
    matching certificate exists for the node's vertex set.
    """

    ctx: _Ctx
    node: int
    u_set: frozenset[Edge]

    def query(self, pairs: Sequence[TerminalPair], j_set: Iterable[Edge]) -> frozenset[int]:
        return _query(
            self.ctx,
            self.node,
            self.u_set,
            tuple(sorted(tuple(p) for p in pairs)),
            frozenset(tuple(e) for e in j_set) | self.u_set,
        )

    def value(self, ell: int, pairs: Sequence[TerminalPair], j_set: Iterable[Edge]) -> int:
        return 1 if ell in self.query(pairs, j_set) else 0


def merge_join(
    f_x: Itinerary, f_y: Itinerary, u_set: Iterable[Edge] = ()
) -> Itinerary:
    """Itinerary for the union of two sides with no edge from the V1 part of
    the second into the V2 part of the first (join nodes)."""
    ctx = f_x.ctx
    if ctx is not f_y.ctx:
        raise ValueError("itineraries come from different runs")
    xs, ys = ctx.below[f_x.node], ctx.below[f_y.node]
    for u, v in ctx.b.edges:
        if u in ys and v in xs:
            raise JoinConditionViolated(
                f"edge ({u},{v}) runs from the second side into the first"
            )
    parent = _find_parent(ctx, f_x.node, f_y.node)
    return Itinerary(ctx, parent, frozenset(tuple(e) for e in u_set))


def merge_guard(
    f_x: Itinerary, f_y: Itinerary, u_set: Iterable[Edge] = ()
) -> Itinerary:
    """Itinerary for the union of a side with a small conformal piece
    (guard nodes): the second side must hold at most the width budget."""
    ctx = f_x.ctx
    if ctx is not f_y.ctx:
        raise ValueError("itineraries come from different runs")
    if len(ctx.below[f_y.node]) > 2 * ctx.w:
        raise BoundViolated("guard piece exceeds the width budget")
    parent = _find_parent(ctx, f_x.node, f_y.node)
    return Itinerary(ctx, parent, frozenset(tuple(e) for e in u_set))


def _find_parent(ctx: _Ctx, a: int, bnode: int) -> int:
    for node, kids in enumerate(ctx.kids):
        if set(kids) == {a, bnode}:
            return node
    raise ValueError("nodes are not siblings in the decomposition")


def make_context(
    b: BipartiteGraph,
    nice: NicePMD,
    forced: Iterable[Edge] = (),
    banned: Iterable[int] = (),
    k: int = 1,
    w: int | None = None,
) -> _Ctx:
    below, kids, root = _binarise(nice.tree)
    return _Ctx(
        b=b,
        forced=frozenset(tuple(e) for e in forced),
        banned=frozenset(banned),
        k=k,
        w=w if w is not None else max(nice.type1_bound, 1),
        below=below,
        kids=kids,
        root_node=root,
    )


def node_itinerary(ctx: _Ctx, node: int, u_set: Iterable[Edge] = ()) -> Itinerary:
    return Itinerary(ctx, node, frozenset(tuple(e) for e in u_set))


# ---------------------------------------------------------------------------
# Solving the k-DAPP through the decomposition pipeline.
# ---------------------------------------------------------------------------


def _solve_full(
    b: BipartiteGraph,
    pairs: tuple[TerminalPair, ...],
    banned: frozenset[int],
    forced: Matching,
    dtw_limit: int,
) -> bool:
    """Branch over direct single-edge routings of adjacent pairs, then run
    the W/proxy pipeline on the remainder."""
    # routing an adjacent pair along its own edge is always safe: any
    # solution reroutes onto the edge since the other paths avoid its
    # terminals already, so a single branch suffices
    direct = frozenset(i for i, (s, t) in enumerate(pairs) if b.has_edge(s, t))
    rest = tuple(p for i, p in enumerate(pairs) if i not in direct)
    direct_terms = {x for i in direct for x in pairs[i]}
    rest_terms = {x for p in rest for x in p}
    extra_banned = frozenset(direct_terms - rest_terms)
    return _solve_on_reduced(b, rest, banned | extra_banned, forced, dtw_limit)


def _solve_on_reduced(
    b: BipartiteGraph,
    pairs: tuple[TerminalPair, ...],
    banned: frozenset[int],
    forced_extra: Matching,
    dtw_limit: int,
) -> bool:
    """Inner engine: non-adjacent distinct-or-not pairs; W/proxy loops; the
    DP per proxied instance on the reduced host."""
    terminals = [x for p in pairs for x in p]
    if not pairs:
        return is_extendable(b, forced_extra)

    # W candidates: extendable matchings covering all terminals, every edge
    # covering a terminal, compatible with the forced edges
    term_set = sorted(set(terminals))
    forced_by_vertex: dict[int, Edge] = {}
    for e in forced_extra:
        for x in e:
            forced_by_vertex[x] = e

    def w_candidates(idx: int, chosen: dict[int, Edge], used: set[int]) -> Iterator[frozenset[Edge]]:
        if idx == len(term_set):
            yield frozenset(chosen.values())
            return
        x = term_set[idx]
        if x in used:
            yield from w_candidates(idx + 1, chosen, used)
            return
        if x in forced_by_vertex:
            e = forced_by_vertex[x]
            other = e[0] if e[1] == x else e[1]
            chosen[x] = e
            used.update(e)
            yield from w_candidates(idx + 1, chosen, used)
            used.difference_update(e)
            del chosen[x]
            return
        for y in sorted(b.adj[x]):
            if y in used or y in forced_by_vertex:
                continue
            e = (min(x, y), max(x, y))
            chosen[x] = e
            used.update(e)
            yield from w_candidates(idx + 1, chosen, used)
            used.difference_update(e)
            del chosen[x]

    from .porosity import _induced_bipartite

    for w_set in w_candidates(0, {}, set()):
        if not is_extendable(b, w_set | forced_extra):
            continue
        # pairs solved directly by their own W edge drop out
        live = tuple(
            (s, t) for s, t in pairs if (min(s, t), max(s, t)) not in w_set
        )
        if not live:
            return True
        w_vertices = frozenset(x for e in w_set for x in e)
        keep = frozenset(b.vertices) - w_vertices
        reduced, fwd, _ = _induced_bipartite(b, keep)
        if reduced.n1 != reduced.n2 or not has_perfect_matching(reduced):
            continue
        red_banned = frozenset(fwd[x] for x in banned if x in fwd)
        red_forced = frozenset(
            (min(fwd[e[0]], fwd[e[1]]), max(fwd[e[0]], fwd[e[1]]))
            for e in forced_extra
            if e[0] in fwd and e[1] in fwd
        )
        for proxy_pairs, w_prime in make_proxies(b, live, w_set, banned):
            red_pairs = tuple(
                (fwd[s], fwd[t]) if fwd[s] < fwd[t] else (fwd[t], fwd[s])
                for s, t in proxy_pairs
            )
            red_wprime = frozenset(
                (min(fwd[e[0]], fwd[e[1]]), max(fwd[e[0]], fwd[e[1]])) for e in w_prime
            )
            union = red_wprime | red_forced
            if len({x for e in union for x in e}) != 2 * len(union):
                continue  # forced edges collide with the proxy cover
            if not is_extendable(reduced, union):
                continue
            if _dp_decides(reduced, red_pairs, red_wprime | red_forced, red_banned, dtw_limit):
                return True
    return False


def _dp_decides(
    b: BipartiteGraph,
    pairs: tuple[TerminalPair, ...],
    forced: Matching,
    banned: frozenset[int],
    dtw_limit: int,
) -> bool:
    """Build the safe nice decomposition for the instance and run the DP."""
    m = some_perfect_matching(b, frozenset())
    if m is None:
        return False
    # prefer a matching extending the forced edges
    banned_for_m = frozenset(x for e in forced for x in e)
    rest = some_perfect_matching(b, banned_for_m)
    if rest is None:
        return False
    m = frozenset(forced) | rest
    terminals = {x for p in pairs for x in p}
    covers = frozenset(e for e in forced if e[0] in terminals or e[1] in terminals)
    completion = w_completion(pairs, covers) if pairs and covers else frozenset()
    extra = frozenset(
        e for e in completion if not b.has_edge(*e)
    )
    d, _ = m_direction(
        b if not extra else BipartiteGraph(b.n1, b.n2, b.edges | extra), m
    )
    try:
        _, dtd = dtw_exact_small(d, dtw_limit)
    except OracleLimitExceeded:
        raise
    prepared = prepare_dtd(d, dtd)
    nice = dtd_to_nice_pmd(b, m, extra, prepared)
    ctx = make_context(
        b,
        nice,
        forced=forced,
        banned=banned,
        k=max(len(pairs), 1),
        w=max(nice.type1_bound, 1),
    )
    root_it = node_itinerary(ctx, ctx.root_node)
    return bool(root_it.query(pairs, forced))


def dapp_solve(
    b: BipartiteGraph,
    pairs: Sequence[TerminalPair],
    dec: NicePMD | None = None,
    dtw_limit: int = 12,
) -> bool:
    """Decide the k-disjoint alternating paths problem via the width DP.

    Adjacent pairs branch over direct routing; the remaining instance runs
    through the W / proxy loops with a per-proxy nice decomposition.  The
    optional dec is a hint only: per-proxy decompositions are recomputed on
    the reduced graphs.
    """
    pairs = tuple(tuple(p) for p in pairs)
    _pairs_ok(b, pairs)
    if not has_perfect_matching(b):
        return False
    return _solve_full(b, pairs, frozenset(), frozenset(), dtw_limit)


def dapp_solve_extending(
    b: BipartiteGraph,
    pairs: Sequence[TerminalPair],
    f_set: Iterable[Edge],
    dec: NicePMD | None = None,
    dtw_limit: int = 12,
    banned: frozenset[int] = frozenset(),
) -> bool:
    """Decide existence of an F-extending solution (F forced into M); paths
    may additionally be required to avoid the banned vertices."""
    pairs = tuple(tuple(p) for p in pairs)
    _pairs_ok(b, pairs)
    f_set = check_matching(b, f_set)
    if not is_extendable(b, f_set):
        raise NotExtendable("f is not extendable")
    return _solve_full(b, pairs, banned, f_set, dtw_limit)


# ---------------------------------------------------------------------------
# Limitedness of linkages.
# ---------------------------------------------------------------------------


def parts_in(paths: Sequence[tuple[int, ...]], ys: frozenset[int]) -> int:
    """Components of the linkage restricted to the vertex set ys."""
    total = 0
    for path in paths:
        inside = False
        for v in path:
            if v in ys:
                if not inside:
                    total += 1
                    inside = True
            else:
                inside = False
    return total


def is_limited(
    b: BipartiteGraph,
    completion: Iterable[tuple[int, int]],
    paths: Sequence[tuple[int, ...]],
    xs: Iterable[int],
    k: int,
    w: int,
    sample: int = 2000,
    seed: int = 0,
) -> bool:
    """Check (k, w)-limitedness: every subset of xs whose cut has matching
    porosity at most w in the completed graph sees at most k + w parts.

    Exhaustive for |xs| <= 10, sampled above.
    """
    import random as _random

    xs = sorted(set(xs))
    extra = frozenset(
        (min(u, v), max(u, v)) for u, v in completion if not b.has_edge(u, v)
    )
    host = b if not extra else BipartiteGraph(b.n1, b.n2, b.edges | extra)

    def check(sub: frozenset[int]) -> bool:
        if matching_porosity(host, sub) > w:
            return True
        return parts_in(paths, sub) <= k + w

    if len(xs) <= 10:
        for r in range(len(xs) + 1):
            for combo in combinations(xs, r):
                if not check(frozenset(combo)):
                    return False
        return True
    rng = _random.Random(seed)
    for _ in range(sample):
        sub = frozenset(v for v in xs if rng.random() < 0.5)
        if not check(sub):
            return False
    return True
