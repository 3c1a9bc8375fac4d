"""Shared text formats: graphs (`b`/`d` headers), matchings (`m`), and the
JSON decomposition schemas."""

from __future__ import annotations

import json
import sys
from typing import Iterable, TextIO

from .bigraph import BipartiteGraph, Edge, Matching, check_matching, graph_from_edges
from .decomp import DirectedTreeDecomposition, LeafTree
from .digraph import Digraph, digraph_from_arcs
from .errors import ParseError

SCHEMA_VERSION = 1


def parse_graph_text(text: str) -> BipartiteGraph | Digraph:
    """Parse the shared graph format: `b <n1> <n2>` with `e <u> <v>` lines,
    or `d <n>` with `a <u> <v>` lines; `#` comments ignored."""
    header: tuple | None = None
    edges: list[tuple[int, int]] = []
    kind = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if parts[0] == "b" and len(parts) == 3:
                kind = "b"
                try:
                    header = (int(parts[1]), int(parts[2]))
                except ValueError:
                    raise ParseError("malformed header counts", lineno)
            elif parts[0] == "d" and len(parts) == 2:
                kind = "d"
                try:
                    header = (int(parts[1]),)
                except ValueError:
                    raise ParseError("malformed header count", lineno)
            else:
                raise ParseError("expected header `b <n1> <n2>` or `d <n>`", lineno)
            continue
        want = "e" if kind == "b" else "a"
        if parts[0] != want or len(parts) != 3:
            raise ParseError(f"expected `{want} <u> <v>`", lineno)
        try:
            u, v = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError("malformed endpoint", lineno)
        if kind == "b":
            n1, n2 = header
            lo, hi = min(u, v), max(u, v)
            if not (1 <= lo <= n1 < hi <= n1 + n2):
                raise ParseError(f"edge ({u},{v}) does not join V1 to V2", lineno)
            edges.append((lo, hi))
        else:
            (n,) = header
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise ParseError(f"arc ({u},{v}) out of range", lineno)
            edges.append((u, v))
    if header is None:
        raise ParseError("empty input")
    if kind == "b":
        return graph_from_edges(header[0], header[1], edges)
    return digraph_from_arcs(header[0], edges)


def parse_graph_file(path: str) -> BipartiteGraph | Digraph:
    text = sys.stdin.read() if path == "-" else open(path).read()
    return parse_graph_text(text)


def write_graph_text(g: BipartiteGraph | Digraph) -> str:
    lines = []
    if isinstance(g, BipartiteGraph):
        lines.append(f"b {g.n1} {g.n2}")
        for u, v in sorted(g.edges):
            lines.append(f"e {u} {v}")
    else:
        lines.append(f"d {g.n}")
        for u, v in sorted(g.arcs):
            lines.append(f"a {u} {v}")
    return "\n".join(lines) + "\n"


def parse_matching_text(text: str, host: BipartiteGraph) -> Matching:
    edges = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if not header_seen:
            if parts[0] != "m":
                raise ParseError("expected `m` header", lineno)
            header_seen = True
            continue
        if parts[0] != "e" or len(parts) != 3:
            raise ParseError("expected `e <u> <v>`", lineno)
        edges.append((int(parts[1]), int(parts[2])))
    if not header_seen:
        raise ParseError("empty matching file")
    return check_matching(host, edges)


def write_matching_text(m: Iterable[Edge]) -> str:
    lines = ["m"]
    for u, v in sorted(m):
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def dtd_to_json(dec: DirectedTreeDecomposition) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "nodes": [
            {
                "id": t,
                "parent": dec.parent[t],
                "bag": sorted(dec.bags[t]),
                "guard": sorted(dec.guards[t]),
            }
            for t in range(dec.m)
        ],
    }


def dtd_from_json(data: dict) -> DirectedTreeDecomposition:
    nodes = data["nodes"]
    m = len(nodes)
    parent = [0] * m
    bags: list[frozenset[int]] = [frozenset()] * m
    guards: list[frozenset[int]] = [frozenset()] * m
    for entry in nodes:
        t = int(entry["id"])
        if not (0 <= t < m):
            raise ParseError(f"node id {t} out of range")
        parent[t] = int(entry["parent"])
        bags[t] = frozenset(int(x) for x in entry.get("bag", []))
        guards[t] = frozenset(int(x) for x in entry.get("guard", []))
    return DirectedTreeDecomposition(tuple(parent), tuple(bags), tuple(guards))


def leaf_tree_to_json(dec: LeafTree) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "tree": [sorted(adj) for adj in dec.adj],
        "leaf_map": {str(k): v for k, v in sorted(dec.leaf_map.items())},
        "root": dec.root,
    }


def leaf_tree_from_json(data: dict) -> LeafTree:
    adj = tuple(frozenset(int(x) for x in row) for row in data["tree"])
    leaf_map = {int(k): int(v) for k, v in data["leaf_map"].items()}
    root = data.get("root")
    return LeafTree(adj, leaf_map, None if root is None else int(root))
