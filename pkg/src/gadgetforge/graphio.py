"""DIMACS-style edge files and JSON solution files.

Graph files are 1-based::

    c optional comment
    p edge <n> <m>
    e <u> <v>        (exactly m lines, 1 <= u < v <= n, no duplicates)

Solution files are JSON objects ``{"k", "vertices", "edge_count"}`` with
1-based vertex ids, matching the graph files they refer to.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import GraphFormatError, InputError
from .graph import Graph, Solution

__all__ = [
    "parse_graph",
    "emit_graph",
    "read_graph",
    "write_graph",
    "solution_to_dict",
    "solution_from_dict",
    "read_solution",
    "write_solution",
]


def parse_graph(text: str) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        tag = tokens[0]
        if tag == "p":
            if n is not None:
                raise GraphFormatError("second 'p' header", lineno)
            if len(tokens) != 4 or tokens[1] != "edge":
                raise GraphFormatError("expected header 'p edge <n> <m>'", lineno)
            try:
                n, m = int(tokens[2]), int(tokens[3])
            except ValueError:
                raise GraphFormatError("non-integer vertex or edge count in header", lineno) from None
            if n < 0 or m < 0:
                raise GraphFormatError("negative count in header", lineno)
        elif tag == "e":
            if n is None:
                raise GraphFormatError("edge line before 'p edge' header", lineno)
            if len(tokens) != 3:
                raise GraphFormatError("expected 'e <u> <v>'", lineno)
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise GraphFormatError("non-integer vertex id", lineno) from None
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}", lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"vertex id out of range 1..{n}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"duplicate edge {key[0]} {key[1]} (first on line {seen[key]})", lineno)
            seen[key] = lineno
            edges.append((key[0] - 1, key[1] - 1))
        else:
            raise GraphFormatError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise GraphFormatError("missing 'p edge <n> <m>' header")
    if len(edges) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, edges)


def emit_graph(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.m}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edge_array.tolist())
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> Graph:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return parse_graph(text)
    except GraphFormatError as exc:
        err = GraphFormatError(f"{path}: {exc}")
        err.line = exc.line
        raise err from exc


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(emit_graph(g))


def solution_to_dict(sol: Solution) -> dict:
    return {"k": sol.k, "vertices": [v + 1 for v in sol.vertices], "edge_count": sol.edge_count}


def solution_from_dict(data: dict) -> Solution:
    try:
        verts = tuple(sorted(int(v) - 1 for v in data["vertices"]))
        k = int(data["k"])
        edge_count = int(data["edge_count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed solution record: {exc}") from exc
    if len(verts) != k or len(set(verts)) != k:
        raise InputError(f"solution lists {len(verts)} vertices but k={k}")
    if verts and verts[0] < 0:
        raise InputError("solution vertex ids are 1-based")
    return Solution(verts, edge_count)


def read_solution(path: str | Path) -> Solution:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return solution_from_dict(data)


def write_solution(sol: Solution, path: str | Path) -> None:
    Path(path).write_text(json.dumps(solution_to_dict(sol), indent=2) + "\n")
