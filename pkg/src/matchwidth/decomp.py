"""Width decompositions: pmw/cycle width, desk-scale directed treewidth via
the cops-and-robber game, prepared proto-decompositions, and the conversion
from directed tree decompositions to nice perfect matching decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .bigraph import BipartiteGraph, Matching, check_matching, is_perfect, some_perfect_matching
from .digraph import Digraph, reachable_from, strong_components
from .direction import m_direction
from .errors import (
    InvalidDecomposition,
    NoPerfectMatching,
    NotNice,
    NotPrepared,
    OracleLimitExceeded,
)
from .porosity import cycle_porosity, directed_cycle_hitting_set, matching_porosity

DTW_ORACLE_LIMIT = 12
PMW_ORACLE_LIMIT = 10


# ---------------------------------------------------------------------------
# Leaf trees (shared by perfect matching and cycle decompositions).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LeafTree:
    """Tree whose leaves are bijectively mapped onto ground-set elements.

    Internal nodes have degree three; when rooted, the root may instead have
    degree two (equivalent to the unrooted cubic tree with one subdivided
    edge).  A one-node tree maps its single node to the single element.
    """

    adj: tuple[frozenset[int], ...]
    leaf_map: dict[int, int]
    root: int | None = None

    @property
    def m(self) -> int:
        return len(self.adj)

    def leaves(self) -> list[int]:
        return sorted(self.leaf_map)

    def edges(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.m) for y in self.adj[x] if x < y]

    def validate(self, ground: Iterable[int]) -> None:
        ground = set(ground)
        if self.m == 0:
            raise InvalidDecomposition("empty tree")
        if sum(len(a) for a in self.adj) != 2 * (self.m - 1):
            raise InvalidDecomposition("not a tree (edge count)")
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != self.m:
            raise InvalidDecomposition("not connected")
        if set(self.leaf_map.values()) != ground or len(self.leaf_map) != len(ground):
            raise InvalidDecomposition("leaf map is not a bijection onto the ground set")
        for x in range(self.m):
            deg = len(self.adj[x])
            if x in self.leaf_map:
                if deg > 1:
                    raise InvalidDecomposition(f"leaf {x} has degree {deg}")
            elif deg == 2 and x == self.root:
                pass
            elif deg != 3:
                raise InvalidDecomposition(f"internal node {x} has degree {deg}")

    def side(self, x: int, y: int) -> frozenset[int]:
        """Ground elements mapped to leaves on the y-side of the edge (x, y)."""
        out: set[int] = set()
        seen = {x, y}
        stack = [y]
        while stack:
            z = stack.pop()
            if z in self.leaf_map:
                out.add(self.leaf_map[z])
            for w in self.adj[z]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(out)

    def children(self, x: int, parent: int | None) -> list[int]:
        return sorted(y for y in self.adj[x] if y != parent)


PMDecomposition = LeafTree
CycleDecomposition = LeafTree


def _tree_from_children(
    children: dict[int, list[int]], leaf_map: dict[int, int], root: int
) -> LeafTree:
    m = 1 + max(
        [k for k in children] + [c for v in children.values() for c in v] + list(leaf_map)
    )
    adj: list[set[int]] = [set() for _ in range(m)]
    for p, cs in children.items():
        for c in cs:
            adj[p].add(c)
            adj[c].add(p)
    return LeafTree(tuple(frozenset(a) for a in adj), dict(leaf_map), root)


def pmd_width(
    b: BipartiteGraph, dec: PMDecomposition, extra_edges: frozenset[tuple[int, int]] = frozenset()
) -> int:
    """Max matching porosity over the tree-edge cuts of the decomposition.

    extra_edges, when given, are added to the graph before evaluating the
    porosities (used for completion-augmented safety widths).
    """
    dec.validate(b.vertices)
    host = b if not extra_edges else BipartiteGraph(b.n1, b.n2, b.edges | extra_edges)
    if not some_perfect_matching(host):
        raise NoPerfectMatching("graph has no perfect matching")
    if dec.m == 1:
        return 0
    width = 0
    for x, y in dec.edges():
        width = max(width, matching_porosity(host, dec.side(x, y)))
    return width


def cycd_width(d: Digraph, dec: CycleDecomposition) -> int:
    """Half the maximum cycle porosity over the tree-edge cuts."""
    dec.validate(d.vertices)
    if dec.m == 1:
        return 0
    worst = 0
    for x, y in dec.edges():
        worst = max(worst, cycle_porosity(d, dec.side(x, y)))
    assert worst % 2 == 0, "cycle porosity of a cut is always even"
    return worst // 2


# ---------------------------------------------------------------------------
# Exact small-width search by dynamic programming over vertex subsets.
# ---------------------------------------------------------------------------


def _branch_dp(
    elements: Sequence[int], cut_value: Callable[[frozenset[int]], int]
) -> tuple[int, LeafTree]:
    """Optimal cubic leaf-tree minimising the max cut_value over tree cuts."""
    elems = list(elements)
    n = len(elems)
    if n == 0:
        raise InvalidDecomposition("empty ground set")
    if n == 1:
        return 0, LeafTree((frozenset(),), {0: elems[0]})
    full = (1 << n) - 1
    fval: dict[int, int] = {}

    def f(mask: int) -> int:
        got = fval.get(mask)
        if got is None:
            got = cut_value(frozenset(elems[i] for i in range(n) if mask >> i & 1))
            fval[mask] = got
        return got

    best: dict[int, int] = {}
    split: dict[int, int] = {}

    masks_by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1, full + 1):
        masks_by_size[bin(mask).count("1")].append(mask)
    for i in range(n):
        best[1 << i] = 0
    for size in range(2, n + 1):
        for mask in masks_by_size[size]:
            lowbit = mask & -mask
            rest = mask ^ lowbit
            cand = None
            sub = rest
            # iterate proper submasks containing lowbit to halve the work
            while True:
                s1 = sub | lowbit
                s2 = mask ^ s1
                if s2:
                    val = max(best[s1], best[s2], f(s1), f(s2))
                    if cand is None or val < cand:
                        cand = val
                        split[mask] = s1
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            best[mask] = cand  # type: ignore[assignment]

    # root split: every decomposition has some edge splitting V into (A, rest)
    top = None
    top_mask = 0
    for sub in range(1, full):
        if not sub & 1:
            continue  # fix element 0 on the left side to halve the search
        val = max(best[sub], best[full ^ sub], f(sub))
        if top is None or val < top:
            top = val
            top_mask = sub
    assert top is not None

    nodes_adj: list[set[int]] = []
    leaf_map: dict[int, int] = {}

    def build(mask: int) -> int:
        idx = len(nodes_adj)
        nodes_adj.append(set())
        if bin(mask).count("1") == 1:
            leaf_map[idx] = elems[(mask.bit_length() - 1)]
            return idx
        s1 = split[mask]
        s2 = mask ^ s1
        a = build(s1)
        bnode = build(s2)
        nodes_adj[idx].add(a)
        nodes_adj[a].add(idx)
        nodes_adj[idx].add(bnode)
        nodes_adj[bnode].add(idx)
        return idx

    left = build(top_mask)
    right = build(full ^ top_mask)
    nodes_adj[left].add(right)
    nodes_adj[right].add(left)
    tree = LeafTree(tuple(frozenset(a) for a in nodes_adj), leaf_map)
    return top, tree


def pmw_exact_small(b: BipartiteGraph, limit: int = PMW_ORACLE_LIMIT) -> tuple[int, PMDecomposition]:
    """Exact perfect matching width with witness (brute force, small graphs)."""
    if b.n > limit:
        raise OracleLimitExceeded(f"{b.n} vertices exceeds oracle limit {limit}")
    if not some_perfect_matching(b):
        raise NoPerfectMatching("graph has no perfect matching")

    def f(shore: frozenset[int]) -> int:
        return matching_porosity(b, shore)

    width, tree = _branch_dp(sorted(b.vertices), f)
    tree.validate(b.vertices)
    return width, tree


def cycw_exact_small(d: Digraph, limit: int = PMW_ORACLE_LIMIT) -> tuple[int, CycleDecomposition]:
    """Exact cycle width with witness (brute force, small digraphs)."""
    if d.n > limit:
        raise OracleLimitExceeded(f"{d.n} vertices exceeds oracle limit {limit}")

    def f(shore: frozenset[int]) -> int:
        return cycle_porosity(d, shore)

    raw, tree = _branch_dp(sorted(d.vertices), f)
    assert raw % 2 == 0
    return raw // 2, tree


# ---------------------------------------------------------------------------
# Directed tree decompositions.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectedTreeDecomposition:
    """Arborescence with bags (partitioning V) and guards on the arcs.

    parent[t] is -1 exactly for the root; guards[t] guards the arc into t
    (empty at the root).  Empty bags are permitted only for proto
    decompositions.
    """

    parent: tuple[int, ...]
    bags: tuple[frozenset[int], ...]
    guards: tuple[frozenset[int], ...]

    @property
    def m(self) -> int:
        return len(self.parent)

    @property
    def root(self) -> int:
        return self.parent.index(-1)

    def children(self, t: int) -> list[int]:
        return [s for s in range(self.m) if self.parent[s] == t]

    def subtree(self, t: int) -> list[int]:
        out = [t]
        i = 0
        while i < len(out):
            out.extend(self.children(out[i]))
            i += 1
        return out

    def subtree_bag(self, t: int) -> frozenset[int]:
        out: set[int] = set()
        for s in self.subtree(t):
            out |= self.bags[s]
        return frozenset(out)

    def gamma(self, t: int) -> frozenset[int]:
        out = set(self.bags[t])
        if self.parent[t] != -1:
            out |= self.guards[t]
        for c in self.children(t):
            out |= self.guards[c]
        return frozenset(out)

    def width(self) -> int:
        return max(len(self.gamma(t)) for t in range(self.m)) - 1


def validate_dtd(
    d: Digraph, dec: DirectedTreeDecomposition, proto: bool = False
) -> tuple[bool, int, str | None]:
    """Check the decomposition axioms; returns (valid, width, reason)."""
    m = dec.m
    roots = [t for t in range(m) if dec.parent[t] == -1]
    if len(roots) != 1:
        return False, 0, "not exactly one root"
    seen: set[int] = set()
    for t in range(m):
        x, steps = t, 0
        while x != -1 and steps <= m:
            x = dec.parent[x]
            steps += 1
        if steps > m:
            return False, 0, "parent pointers contain a cycle"
    covered: set[int] = set()
    for t in range(m):
        bag = dec.bags[t]
        if not proto and not bag:
            return False, 0, f"empty bag at node {t}"
        if covered & bag:
            return False, 0, "bags overlap"
        covered |= bag
    if covered != set(d.vertices):
        return False, 0, "bags do not partition the vertex set"
    for t in range(m):
        if dec.parent[t] == -1:
            continue
        below = dec.subtree_bag(t)
        guard = dec.guards[t]
        inner = below - guard
        if not inner:
            continue
        outside = reachable_from(d, inner, guard) - below
        if outside and (reachable_from(d, outside, guard) & inner):
            return False, 0, f"guard of node {t} misses a walk"
    return True, dec.width(), None


# ---------------------------------------------------------------------------
# Cops and robber: exact search and decomposition extraction.
# ---------------------------------------------------------------------------


def _scc_cache(d: Digraph) -> Callable[[frozenset[int]], tuple[frozenset[int], ...]]:
    cache: dict[frozenset[int], tuple[frozenset[int], ...]] = {}

    def comps(banned: frozenset[int]) -> tuple[frozenset[int], ...]:
        got = cache.get(banned)
        if got is None:
            got = tuple(strong_components(d, banned))
            cache[banned] = got
        return got

    return comps


def _legal_responses(
    comps: Callable[[frozenset[int]], tuple[frozenset[int], ...]],
    cops: frozenset[int],
    robber: frozenset[int],
    move: frozenset[int],
) -> list[frozenset[int]]:
    """Robber components after the cops move (the standard transition rule)."""
    hold = cops & move
    sample = next(iter(robber))
    region = None
    for comp in comps(hold):
        if sample in comp:
            region = comp
            break
    assert region is not None
    return [c for c in comps(move) if c <= region]


def _monotone_win(
    d: Digraph, k: int
) -> dict[tuple[frozenset[int], frozenset[int]], frozenset[int]] | None:
    """Winning moves of the k-cop progress-monotone game, or None.

    Moves place at least one cop inside the robber component and must shrink
    the territory; the search is therefore acyclic and memoisable.
    """
    verts = sorted(d.vertices)
    comps = _scc_cache(d)
    moves_pool: list[frozenset[int]] = [
        frozenset(c) for size in range(1, k + 1) for c in combinations(verts, size)
    ]
    memo: dict[tuple[frozenset[int], frozenset[int]], frozenset[int] | None] = {}

    def win(cops: frozenset[int], robber: frozenset[int]) -> frozenset[int] | None:
        key = (cops, robber)
        if key in memo:
            return memo[key]
        memo[key] = None
        result = None
        for move in moves_pool:
            if not move & robber:
                continue
            responses = _legal_responses(comps, cops, robber, move)
            if any(not r < robber for r in responses):
                continue  # a response escapes or fails to shrink: not monotone
            if all(win(move, r) is not None for r in responses):
                result = move
                break
        memo[key] = result
        return result

    start_positions = [ (frozenset(), frozenset(c)) for c in comps(frozenset()) ]
    strategy: dict[tuple[frozenset[int], frozenset[int]], frozenset[int]] = {}
    for pos in start_positions:
        if win(*pos) is None:
            return None
    for key, move in memo.items():
        if move is not None:
            strategy[key] = move
    return strategy


def cop_number_monotone(d: Digraph, limit: int = DTW_ORACLE_LIMIT) -> int:
    if d.n > limit:
        raise OracleLimitExceeded(f"{d.n} vertices exceeds oracle limit {limit}")
    for k in range(1, d.n + 1):
        if _monotone_win(d, k) is not None:
            return k
    raise AssertionError("n cops always win")


def cop_number_game_exact(d: Digraph, limit: int = 7) -> int:
    """True game value with arbitrary (including repositioning) moves.

    Least-fixpoint computation over all positions; tiny digraphs only.
    Used to cross-check the progress-monotone search.
    """
    if d.n > limit:
        raise OracleLimitExceeded(f"{d.n} vertices exceeds oracle limit {limit}")
    verts = sorted(d.vertices)
    comps = _scc_cache(d)
    for k in range(1, d.n + 1):
        cop_sets = [
            frozenset(c) for size in range(0, k + 1) for c in combinations(verts, size)
        ]
        positions = [
            (c, r) for c in cop_sets for r in comps(c)
        ]
        winning: set[tuple[frozenset[int], frozenset[int]]] = set()
        changed = True
        while changed:
            changed = False
            for pos in positions:
                if pos in winning:
                    continue
                cops, robber = pos
                for move in cop_sets:
                    if not move:
                        continue
                    responses = _legal_responses(comps, cops, robber, move)
                    if all((move, r) in winning for r in responses):
                        winning.add(pos)
                        changed = True
                        break
        if all((frozenset(), frozenset(r)) in winning for r in comps(frozenset())):
            return k
    raise AssertionError("n cops always win")


def dtw_exact_small(
    d: Digraph, limit: int = DTW_ORACLE_LIMIT
) -> tuple[int, DirectedTreeDecomposition]:
    """Minimum cop number (progress-monotone game) and a certificate
    decomposition of width at most 2k - 1 <= 3k - 2 extracted from the
    winning strategy."""
    if d.n > limit:
        raise OracleLimitExceeded(f"{d.n} vertices exceeds oracle limit {limit}")
    if d.n == 0:
        raise InvalidDecomposition("empty digraph")
    strategy = None
    number = 0
    for k in range(1, d.n + 1):
        strategy = _monotone_win(d, k)
        if strategy is not None:
            number = k
            break
    assert strategy is not None

    comps = _scc_cache(d)
    parent: list[int] = []
    bags: list[frozenset[int]] = []
    guards: list[frozenset[int]] = []

    def build(cops: frozenset[int], robber: frozenset[int], parent_idx: int) -> int:
        move = strategy[(cops, robber)]
        idx = len(parent)
        parent.append(parent_idx)
        bags.append(move & robber)
        guards.append(cops)
        for resp in _legal_responses(comps, cops, robber, move):
            build(move, resp, idx)
        return idx

    start = comps(frozenset())
    first = frozenset(), frozenset(start[0])
    root_idx = build(*first, -1)
    guards[root_idx] = frozenset()
    for comp in start[1:]:
        build(frozenset(), frozenset(comp), root_idx)
        # the extra children of the root get guard = empty cop set, which
        # strongly guards a strong component of d
    dec = DirectedTreeDecomposition(tuple(parent), tuple(bags), tuple(guards))
    ok, width, reason = validate_dtd(d, dec)
    if not ok:
        raise AssertionError(f"extracted decomposition invalid: {reason}")
    return number, dec


# ---------------------------------------------------------------------------
# The explicit pursuit from a cycle decomposition (Lemma "cops can catch").
# ---------------------------------------------------------------------------


@dataclass
class PlayTranscript:
    cop_positions: list[frozenset[int]] = field(default_factory=list)
    robber_positions: list[frozenset[int] | None] = field(default_factory=list)
    caught: bool = False

    def max_cops(self) -> int:
        return max((len(c) for c in self.cop_positions), default=0)


def greedy_robber(options: list[frozenset[int]]) -> frozenset[int] | None:
    """Adversary policy: largest component, ties by smallest minimum vertex."""
    if not options:
        return None
    return max(options, key=lambda c: (len(c), -min(c)))


def cops_play(
    d: Digraph,
    dec: CycleDecomposition,
    robber: Callable[[list[frozenset[int]]], frozenset[int] | None] = greedy_robber,
) -> PlayTranscript:
    """Execute the guard-set pursuit along the decomposition tree.

    Cops occupy, per tree edge, a hitting set for all directed cycles
    crossing the induced cut, then descend towards the robber's subtree.
    The transcript ends in capture.
    """
    dec.validate(d.vertices)
    comps = _scc_cache(d)
    transcript = PlayTranscript()

    hitting: dict[tuple[int, int], frozenset[int]] = {}

    def s_edge(x: int, y: int) -> frozenset[int]:
        key = (min(x, y), max(x, y))
        got = hitting.get(key)
        if got is None:
            got = directed_cycle_hitting_set(d, dec.side(x, y))
            hitting[key] = got
        return got

    def place(cops: frozenset[int], prev: frozenset[int], prev_robber: frozenset[int]) -> frozenset[int] | None:
        transcript.cop_positions.append(cops)
        options = _legal_responses(comps, prev, prev_robber, cops)
        choice = robber(options)
        transcript.robber_positions.append(choice)
        return choice

    if dec.m == 1:
        only = dec.leaf_map[0]
        transcript.cop_positions.append(frozenset({only}))
        transcript.robber_positions.append(None)
        transcript.caught = True
        return transcript

    # opening: one cop on the lowest-id vertex
    leaf = min(dec.leaf_map, key=lambda x: dec.leaf_map[x])
    v = dec.leaf_map[leaf]
    c0 = frozenset({v})
    transcript.cop_positions.append(c0)
    opts = [frozenset(c) for c in comps(c0)]
    r = robber(opts)
    transcript.robber_positions.append(r)
    if r is None:
        transcript.caught = True
        return transcript

    if dec.m == 2:
        # two-vertex ground set: occupy both vertices
        both = frozenset(dec.leaf_map.values())
        r = place(both, c0, r)
        if r is None:
            transcript.caught = True
            return transcript
        raise AssertionError("robber escaped the two-vertex capture")

    t0 = next(iter(dec.adj[leaf]))
    e1, e2 = [y for y in dec.adj[t0] if y != leaf]
    c1 = c0 | s_edge(t0, e1) | s_edge(t0, e2)
    r = place(c1, c0, r)
    if r is None:
        transcript.caught = True
        return transcript

    side1 = dec.side(t0, e1)
    branch = e1 if r <= side1 else e2
    prev_cops = c1
    d_node, t_node = t0, branch

    while True:
        guard = s_edge(d_node, t_node)
        r2 = place(guard, prev_cops, r)
        if r2 is None:
            transcript.caught = True
            return transcript
        r = r2
        prev_cops = guard
        if t_node in dec.leaf_map:
            final = guard | frozenset({dec.leaf_map[t_node]})
            r3 = place(final, prev_cops, r)
            if r3 is None:
                transcript.caught = True
                return transcript
            raise AssertionError("robber escaped the leaf capture")
        e1p, e2p = [y for y in dec.adj[t_node] if y != d_node]
        cops = guard | s_edge(t_node, e1p) | s_edge(t_node, e2p)
        r2 = place(cops, prev_cops, r)
        if r2 is None:
            transcript.caught = True
            return transcript
        r = r2
        prev_cops = cops
        side = dec.side(t_node, e1p)
        d_node, t_node = t_node, (e1p if r <= side else e2p)


# ---------------------------------------------------------------------------
# Prepared proto decompositions (subcubic shaping).
# ---------------------------------------------------------------------------


def _children_topo_order(
    d: Digraph, dec: DirectedTreeDecomposition, kids: list[int]
) -> list[int]:
    """Order children so no arc runs from a later subtree into an earlier one."""
    sets = {c: dec.subtree_bag(c) for c in kids}
    succ: dict[int, set[int]] = {c: set() for c in kids}
    for u, v in d.arcs:
        for a in kids:
            if u in sets[a]:
                for bnode in kids:
                    if bnode != a and v in sets[bnode]:
                        succ[a].add(bnode)
    order: list[int] = []
    remaining = set(kids)
    while remaining:
        picked = None
        for c in sorted(remaining):
            if all(c not in succ[o] for o in remaining if o != c):
                picked = c
                break
        if picked is None:
            raise NotNice("children subtrees cannot be ordered without back edges")
        order.append(picked)
        remaining.remove(picked)
    return order


def prepare_dtd(d: Digraph, dec: DirectedTreeDecomposition) -> DirectedTreeDecomposition:
    """Split high-degree nodes with empty-bag chain nodes so the tree becomes
    subcubic, preserving the guard axioms and the width."""
    ok, _, reason = validate_dtd(d, dec, proto=True)
    if not ok:
        raise InvalidDecomposition(f"input decomposition invalid: {reason}")

    parent = list(dec.parent)
    bags = list(dec.bags)
    guards = list(dec.guards)

    def children_of(t: int) -> list[int]:
        return [s for s in range(len(parent)) if parent[s] == t]

    work = list(range(len(parent)))
    while work:
        t = work.pop()
        kids = children_of(t)
        # a root with a non-empty bag later hangs a bag subtree, so it may
        # keep at most two successors to stay subcubic after conversion
        allowed = 3 if (parent[t] == -1 and not bags[t]) else 2
        if len(kids) <= allowed:
            continue
        current = DirectedTreeDecomposition(tuple(parent), tuple(bags), tuple(guards))
        ordered = _children_topo_order(d, current, kids)
        keep, rest = ordered[0], ordered[1:]
        new = len(parent)
        parent.append(t)
        bags.append(frozenset())
        incoming = guards[t] if parent[t] != -1 else frozenset()
        guards.append(frozenset(incoming | bags[t]))
        for c in rest:
            parent[c] = new
        work.append(t)
        work.append(new)

    out = DirectedTreeDecomposition(tuple(parent), tuple(bags), tuple(guards))
    ok, _, reason = validate_dtd(d, out, proto=True)
    if not ok:
        raise AssertionError(f"prepared decomposition invalid: {reason}")
    return out


def _induces_strongly_connected(d: Digraph, vertex_set: frozenset[int]) -> bool:
    if not vertex_set:
        return False
    banned = frozenset(d.vertices) - vertex_set
    return len(strong_components(d, banned)) == 1


def is_prepared(d: Digraph, dec: DirectedTreeDecomposition, width: int | None = None) -> bool:
    """Check the prepared axioms (subcubic; strong or small child subtrees;
    two-successor nodes orderable without back edges)."""
    ok, w, _ = validate_dtd(d, dec, proto=True)
    if not ok:
        return False
    if width is None:
        width = w
    for t in range(dec.m):
        kids = dec.children(t)
        allowed = 3 if dec.parent[t] == -1 else 2
        if len(kids) > allowed:
            return False
        if len(kids) == 1:
            below = dec.subtree_bag(kids[0])
            if not (_induces_strongly_connected(d, below) or len(below) <= width + 1):
                return False
        elif len(kids) == 2:
            a, bnode = kids
            seta = dec.subtree_bag(a)
            setb = dec.subtree_bag(bnode)
            sa = _induces_strongly_connected(d, seta)
            sb = _induces_strongly_connected(d, setb)
            sma = len(seta) <= width + 1
            smb = len(setb) <= width + 1
            no_back_ba = not any(u in setb and v in seta for u, v in d.arcs)
            no_back_ab = not any(u in seta and v in setb for u, v in d.arcs)
            first_as_t1 = (sma and (smb or sb)) or (sa and no_back_ba)
            second_as_t1 = (smb and (sma or sa)) or (sb and no_back_ab)
            if not (first_as_t1 or second_as_t1):
                return False
    return True


# ---------------------------------------------------------------------------
# From prepared proto decompositions to nice perfect matching decompositions.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NicePMD:
    """Rooted perfect matching decomposition with its width data.

    type1_bound is the budget used by the Type-1 guard classification and by
    the linkage dynamic program (at least the width, at least the size of the
    largest hung bag subtree).
    """

    tree: PMDecomposition
    width: int
    type1_bound: int


class _TreeBuilder:
    """Mutable adjacency accumulator used while assembling leaf trees."""

    def __init__(self) -> None:
        self.adj: list[set[int]] = []

    def node(self) -> int:
        self.adj.append(set())
        return len(self.adj) - 1

    def link(self, x: int, y: int) -> None:
        self.adj[x].add(y)
        self.adj[y].add(x)

    def caterpillar(self, items: list[int]) -> tuple[int, dict[int, int]]:
        """Left-leaning binary caterpillar; returns (root, leaf -> item)."""
        assert items
        if len(items) == 1:
            n = self.node()
            return n, {n: items[0]}
        leaves: dict[int, int] = {}
        first = self.node()
        leaves[first] = items[0]
        spine = first
        for x in items[1:-1]:
            up = self.node()
            leaf = self.node()
            leaves[leaf] = x
            self.link(up, spine)
            self.link(up, leaf)
            spine = up
        top = self.node()
        last = self.node()
        leaves[last] = items[-1]
        self.link(top, spine)
        self.link(top, last)
        return top, leaves


def dtd_to_nice_pmd(
    b: BipartiteGraph,
    m: Matching,
    extra_edges: frozenset[tuple[int, int]],
    dec: DirectedTreeDecomposition,
) -> NicePMD:
    """Translate a prepared proto directed tree decomposition of the
    M-direction of b (+extra edges) into a nice perfect matching
    decomposition of b.

    Leaves with bags, single-successor and two-successor nodes each hang a
    cubic subtree holding their bag; every digraph leaf then expands into the
    two endpoints of its matching edge.
    """
    m = check_matching(b, m)
    host = b if not extra_edges else BipartiteGraph(b.n1, b.n2, b.edges | extra_edges)
    if not is_perfect(host, m):
        raise NoPerfectMatching("m is not a perfect matching")
    d, tag = m_direction(host, m)
    if not is_prepared(d, dec):
        raise NotPrepared("input is not a prepared proto decomposition")

    tb = _TreeBuilder()
    leaf_of: dict[int, int] = {}  # tree leaf -> digraph vertex
    type1_sizes: list[int] = [0]

    def hang_bag(bag: frozenset[int]) -> int:
        root, leaves = tb.caterpillar(sorted(bag))
        leaf_of.update(leaves)
        type1_sizes.append(2 * len(bag))
        return root

    def build(t: int) -> int | None:
        kids_raw = dec.children(t)
        bag = dec.bags[t]
        if not kids_raw:
            if not bag:
                return None
            return hang_bag(bag)
        kids = _children_topo_order(d, dec, kids_raw) if len(kids_raw) > 1 else kids_raw
        built = [x for x in (build(c) for c in kids) if x is not None]
        if not built:
            if not bag:
                return None
            return hang_bag(bag)
        if len(built) == 1:
            if not bag:
                return built[0]
            node = tb.node()
            tb.link(node, built[0])
            tb.link(node, hang_bag(bag))
            return node
        if t == dec.root and not bag and len(built) == 3:
            node = tb.node()
            for x in built:
                tb.link(node, x)
            return node
        # right-fold the (topologically ordered) children into binary joins
        acc = built[-1]
        for x in reversed(built[:-1]):
            node = tb.node()
            tb.link(node, x)
            tb.link(node, acc)
            acc = node
        if not bag:
            return acc
        upper = tb.node()
        tb.link(upper, acc)
        tb.link(upper, hang_bag(bag))
        return upper

    top = build(dec.root)
    if top is None:
        raise InvalidDecomposition("decomposition carries no vertices")

    # expand each digraph leaf into the endpoints of its matching edge
    final_leaf_map: dict[int, int] = {}
    for leaf, v in sorted(leaf_of.items()):
        a_v, b_v = tag[v]
        la = tb.node()
        lb = tb.node()
        tb.link(leaf, la)
        tb.link(leaf, lb)
        final_leaf_map[la] = a_v
        final_leaf_map[lb] = b_v

    if len(tb.adj) == 3 and len(final_leaf_map) == 2:
        # a single matching edge: the decomposition is the bare two-leaf tree,
        # rooted at a leaf so the root-successor conditions are vacuous
        values = [final_leaf_map[x] for x in sorted(final_leaf_map)]
        tree = LeafTree(
            (frozenset({1}), frozenset({0})), {0: values[0], 1: values[1]}, root=0
        )
    else:
        tree = LeafTree(tuple(frozenset(s) for s in tb.adj), final_leaf_map, root=top)
    tree.validate(b.vertices)
    width = pmd_width(b, tree)
    width_host = width if not extra_edges else pmd_width(b, tree, extra_edges)
    bound = max(width_host, max(type1_sizes), 1)
    nice = NicePMD(tree, width, bound)
    ok, reason = nice_pmd_check(b, nice)
    if not ok:
        raise NotNice(f"conversion produced a non-nice decomposition: {reason}")
    return nice


def _is_elementary_set(b: BipartiteGraph, xs: frozenset[int]) -> bool:
    from .porosity import _induced_bipartite
    from .bigraph import has_perfect_matching, admissible_edges

    if not xs:
        return False
    sub, _, _ = _induced_bipartite(b, xs)
    if sub.n1 != sub.n2 or not has_perfect_matching(sub):
        return False
    adm = admissible_edges(sub)
    if len(adm) == 0:
        return False
    nbrs: dict[int, set[int]] = {v: set() for v in sub.vertices}
    for u, v in adm:
        nbrs[u].add(v)
        nbrs[v].add(u)
    seen = {1}
    stack = [1]
    while stack:
        x = stack.pop()
        for y in nbrs[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == sub.n


def nice_pmd_check(b: BipartiteGraph, nice: NicePMD) -> tuple[bool, str | None]:
    """Verify the niceness axioms of a rooted perfect matching decomposition."""
    from .bigraph import is_conformal

    tree = nice.tree
    root = tree.root
    if root is None:
        return False, "decomposition is not rooted"
    k = nice.type1_bound

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

    below: dict[int, frozenset[int]] = {}
    for x in reversed(order):
        if x in tree.leaf_map:
            below[x] = frozenset({tree.leaf_map[x]})
        else:
            acc: set[int] = set()
            for y in tree.adj[x]:
                if y != parent[x]:
                    acc |= below[y]
            below[x] = frozenset(acc)

    def kids(x: int) -> list[int]:
        return [y for y in tree.adj[x] if y != parent[x]]

    def no_edge_v2_to_v1(a: frozenset[int], c: frozenset[int]) -> bool:
        for u, v in b.edges:
            x2, y1 = (v, u)  # v in V2, u in V1
            if x2 in a and y1 in c:
                return False
        return True

    def is_join(x: int) -> bool:
        cs = kids(x)
        if len(cs) != 2:
            return False
        for t1, t2 in ((cs[0], cs[1]), (cs[1], cs[0])):
            if no_edge_v2_to_v1(below[t1], below[t2]) and _is_elementary_set(b, below[t1]):
                return True
        return False

    def is_guard1(x: int) -> bool:
        xs = below[x]
        return len(xs) <= 2 * k and is_conformal(b, xs)

    def is_guard2(x: int) -> bool:
        cs = kids(x)
        if len(cs) != 2:
            return False
        for t1, t2 in ((cs[0], cs[1]), (cs[1], cs[0])):
            if is_guard1(t1) and (
                is_join(t2)
                or (is_conformal(b, below[t2]) and _is_elementary_set(b, below[t2]))
            ):
                return True
        return False

    for x in order:
        if x == root or x in tree.leaf_map:
            continue
        cs = kids(x)
        basic = len(cs) == 2 and all(c in tree.leaf_map for c in cs)
        if basic or is_join(x) or is_guard1(x) or is_guard2(x):
            continue
        return False, f"node {x} is neither basic, join, nor guard"

    # root condition (vacuous when the root is a leaf)
    from itertools import permutations as _perms

    if root in tree.leaf_map:
        return True, None
    sortable: list[int] = []
    for c in kids(root):
        if is_guard1(c):
            continue
        if is_join(c) or (is_conformal(b, below[c]) and _is_elementary_set(b, below[c])):
            sortable.append(c)
        else:
            return False, f"root successor {c} of no admissible type"
    if len(sortable) > 3:
        return False, "root has too many ordered successors"
    ok_order = False
    for perm in _perms(sortable):
        good = True
        for i1 in range(len(perm)):
            for j1 in range(i1 + 1, len(perm)):
                # no edge from V1 side of the later to V2 side of the earlier
                a_later = below[perm[j1]]
                c_earlier = below[perm[i1]]
                if not all(
                    not (u in a_later and v in c_earlier) for u, v in b.edges
                ):
                    good = False
        if good:
            ok_order = True
            break
    if not ok_order:
        return False, "root successors cannot be ordered"
    return True, None


def compute_pmd(
    b: BipartiteGraph,
    dtd: DirectedTreeDecomposition | None = None,
    dtw_limit: int = DTW_ORACLE_LIMIT,
) -> NicePMD:
    """Full pipeline: pick a matching, build the M-direction, find a directed
    tree decomposition (exact small-scale search unless one is supplied),
    prepare it, and convert to a nice perfect matching decomposition."""
    m = some_perfect_matching(b)
    if m is None:
        raise NoPerfectMatching("graph has no perfect matching")
    d, _ = m_direction(b, m)
    if dtd is None:
        _, dtd = dtw_exact_small(d, dtw_limit)
    else:
        ok, _, reason = validate_dtd(d, dtd, proto=True)
        if not ok:
            raise InvalidDecomposition(f"supplied decomposition invalid: {reason}")
    prepared = prepare_dtd(d, dtd)
    return dtd_to_nice_pmd(b, m, frozenset(), prepared)
