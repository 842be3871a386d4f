"""Mutable black/white colorings with incremental edge bookkeeping, and repair reports."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable

from ..errors import InputError, RepairViolation
from ..graph import Graph, Solution
from ..reductions import ReductionStep, ReductionTrace


class Coloring:
    """Black vertex set of a reduced graph.

    Keeps the black-degree of every vertex and the number of black edges
    up to date under recoloring, so moves can be evaluated in time
    proportional to the vertices touched.
    """

    def __init__(self, g: Graph, black: Iterable[int] = ()):
        self.g = g
        self.adj = g.adjacency
        self.color = bytearray(g.n)
        self.bdeg = [0] * g.n
        self.edges = 0
        for v in black:
            if not 0 <= v < g.n:
                raise InputError(f"vertex {v} outside 0..{g.n - 1}")
            if self.color[v]:
                raise InputError(f"vertex {v} listed twice")
            self._set_black(v)

    def copy(self) -> "Coloring":
        other = object.__new__(Coloring)
        other.g = self.g
        other.adj = self.adj
        other.color = bytearray(self.color)
        other.bdeg = list(self.bdeg)
        other.edges = self.edges
        return other

    def _set_black(self, v: int) -> None:
        self.color[v] = 1
        self.edges += self.bdeg[v]
        for u in self.adj[v]:
            self.bdeg[u] += 1

    def _set_white(self, v: int) -> None:
        self.color[v] = 0
        self.edges -= self.bdeg[v]
        for u in self.adj[v]:
            self.bdeg[u] -= 1

    def is_black(self, v: int) -> bool:
        return bool(self.color[v])

    def recolor(self, to_white: Iterable[int], to_black: Iterable[int]) -> int:
        """Whiten then blacken the given vertices; returns the change in black edges."""
        before = self.edges
        for v in to_white:
            if not self.color[v]:
                raise InputError(f"vertex {v} is already white")
            self._set_white(v)
        for v in to_black:
            if self.color[v]:
                raise InputError(f"vertex {v} is already black")
            self._set_black(v)
        return self.edges - before

    def black_vertices(self) -> list[int]:
        return [v for v, c in enumerate(self.color) if c]

    def black_count(self) -> int:
        return sum(self.color)

    def incident_black_edges(self, vertices: Iterable[int]) -> int:
        """Black edges with at least one endpoint in ``vertices`` (all assumed black)."""
        vs = set(vertices)
        total = sum(self.bdeg[v] for v in vs)
        inside = sum(1 for v in vs for u in self.adj[v] if u in vs)
        return total - inside // 2

    def to_solution(self) -> Solution:
        return Solution(tuple(self.black_vertices()), self.edges)

    def gadget_counts(self, step: ReductionStep) -> list[int]:
        size = step.gadget_size
        return [sum(self.color[v * size:(v + 1) * size]) for v in range(step.base_n)]


@dataclass
class Move:
    kind: str
    to_white: list[int]
    to_black: list[int]
    delta: int
    gadget: int | None = None


@dataclass
class RepairReport:
    """Audit log of a repair: every move with its measured edge delta.

    ``violations`` collects every place where a move the argument promises to
    be non-losing actually lost edges, or where a promised witness was
    missing.  An empty list means the run followed the argument exactly.
    """

    initial_edges: int
    final_edges: int | None = None
    iterations: int = 0
    moves: list[Move] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    strict: bool = False

    def log(self, kind: str, to_white, to_black, delta: int, gadget: int | None = None) -> None:
        self.moves.append(Move(kind, sorted(to_white), sorted(to_black), delta, gadget))

    def violation(self, kind: str, **detail) -> None:
        record = {"kind": kind, **detail}
        self.violations.append(record)
        if self.strict:
            raise RepairViolation(f"{kind}: {detail}")

    @property
    def total_delta(self) -> int:
        return sum(m.delta for m in self.moves)

    def to_dict(self) -> dict:
        return {
            "initial_edges": self.initial_edges,
            "final_edges": self.final_edges,
            "iterations": self.iterations,
            "moves": [asdict(m) for m in self.moves],
            "violations": self.violations,
            "notes": self.notes,
        }


def select_step(trace: ReductionTrace, level: int | None, kind: str) -> ReductionStep:
    if not trace.steps:
        raise InputError("empty trace")
    idx = len(trace.steps) - 1 if level is None else level
    if not -len(trace.steps) <= idx < len(trace.steps):
        raise InputError(f"level {level} outside the trace")
    step = trace.steps[idx]
    if step.kind != kind:
        raise InputError(f"level {idx} of the trace is a {step.kind} step, expected {kind}")
    return step


def start(g_star: Graph, step: ReductionStep, sol: Solution, strict: bool) -> tuple[Coloring, RepairReport]:
    if g_star.n != step.out_n:
        raise InputError(f"graph has {g_star.n} vertices, the {step.kind} level has {step.out_n}")
    if len(sol.vertices) != step.k_out:
        raise InputError(f"solution has {len(sol.vertices)} vertices, expected k={step.k_out}")
    col = Coloring(g_star, sol.vertices)
    return col, RepairReport(initial_edges=col.edges, strict=strict)
