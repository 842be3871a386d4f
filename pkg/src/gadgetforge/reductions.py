"""Degree-reducing reductions for Densest-k-Subgraph and the trace used to undo them.

Three transformations are provided:

* :func:`reduce_clique_to_dks5` replaces every vertex of a Clique instance by
  an ``n^2 x n^2`` torus and joins tori along base edges (max degree 5);
* :func:`reduce_deg5_to_deg4_fence` replaces every vertex by the 8-vertex
  fence gadget (max degree 4);
* :func:`reduce_deg4_to_deg3_cycle` replaces every vertex by a 4-cycle
  (max degree 3).

Every reduction lays out gadget ``v`` as the contiguous block
``v * size .. (v + 1) * size - 1`` of the output graph, so the gadget of an
output vertex is ``x // size``.  The :class:`ReductionStep` records the base
size, the port used for every base edge and (for tori) the vertex order
``phi``; that is enough to recover the base graph and to lift solutions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError, PreconditionError, ResourceLimitError
from .generators import torus_edges
from .graph import CliqueInstance, DksInstance, Graph, Solution, max_degree

__all__ = [
    "FENCE_EDGES",
    "FENCE_OUTER",
    "FENCE_INNER",
    "CYCLE_EDGES",
    "DEFAULT_MAX_VERTICES",
    "fence_gadget",
    "cycle_gadget",
    "psi",
    "sigma",
    "padded_size",
    "pad_graph",
    "TorusLayout",
    "ReductionStep",
    "ReductionTrace",
    "reduce_clique_to_dks5",
    "reduce_deg5_to_deg4_fence",
    "reduce_deg4_to_deg3_cycle",
    "reduce_full_chain",
    "reduce_chain",
    "clique_threshold",
    "replay",
    "embed_solution",
    "lift_solution",
    "gadget_black_counts",
]

DEFAULT_MAX_VERTICES = 10**6

# Local indices 0..7 stand for v1..v8; v7, v8 are the inner vertices.
FENCE_EDGES: tuple[tuple[int, int], ...] = (
    (0, 1), (0, 6), (0, 5), (1, 6), (1, 2), (2, 7), (2, 3),
    (3, 4), (3, 7), (4, 5), (4, 7), (5, 6), (6, 7),
)
FENCE_OUTER = (0, 1, 2, 3, 4, 5)
FENCE_INNER = (6, 7)
CYCLE_EDGES: tuple[tuple[int, int], ...] = ((0, 1), (1, 2), (2, 3), (0, 3))
CYCLE_PORTS = (0, 1, 2, 3)

_GADGETS = {
    "fence": (8, FENCE_EDGES, FENCE_OUTER, 13),
    "cycle": (4, CYCLE_EDGES, CYCLE_PORTS, 4),
}


def fence_gadget() -> Graph:
    return Graph(8, FENCE_EDGES)


def cycle_gadget() -> Graph:
    return Graph(4, CYCLE_EDGES)


def _odd_root(n: int) -> int:
    r = math.isqrt(n)
    if n < 1 or r * r != n or r % 2 == 0:
        raise InputError(f"n={n} is not an odd perfect square")
    return r


def psi(phi_v: int, n: int) -> int:
    """Row of the attachment point: ``(phi_v * n * sqrt(n)) mod n^2``."""
    r = _odd_root(n)
    if not 0 <= phi_v < n:
        raise InputError(f"phi value {phi_v} outside 0..{n - 1}")
    return (phi_v * n * r) % (n * n)


def sigma(phi_v: int, n: int) -> int:
    """Column of the attachment point: ``floor(phi_v * n * sqrt(n) / n^2)``."""
    r = _odd_root(n)
    if not 0 <= phi_v < n:
        raise InputError(f"phi value {phi_v} outside 0..{n - 1}")
    return (phi_v * n * r) // (n * n)


def padded_size(n: int, s: int) -> int:
    """Smallest odd square that is at least ``n`` and larger than ``s + 1``."""
    r = math.isqrt(max(n, s + 2) - 1) + 1
    if r % 2 == 0:
        r += 1
    return r * r


def pad_graph(g: Graph, n: int) -> Graph:
    """Append isolated vertices so that ``g`` has ``n`` vertices."""
    if n < g.n:
        raise InputError(f"cannot pad {g.n} vertices down to {n}")
    return Graph(n, g.edge_array, validate=False)


def clique_threshold(s: int, n: int) -> int:
    return 2 * s * n**4 + s * (s - 1) // 2


@dataclass(frozen=True)
class TorusLayout:
    """Coordinates of the tori built for a padded base graph on ``n`` vertices."""

    n: int
    phi: tuple[int, ...]

    @property
    def side(self) -> int:
        return self.n * self.n

    @property
    def torus_size(self) -> int:
        return self.n**4

    def vertex_index(self, v: int, i: int, j: int) -> int:
        side = self.side
        if not (0 <= v < self.n and 0 <= i < side and 0 <= j < side):
            raise InputError(f"torus coordinate ({v}, {i}, {j}) out of range")
        return v * self.torus_size + i * side + j

    def coordinates(self, x: int) -> tuple[int, int, int]:
        v, rest = divmod(x, self.torus_size)
        i, j = divmod(rest, self.side)
        return v, i, j

    def port(self, u: int) -> tuple[int, int]:
        """Coordinate ``(psi(u), sigma(u))`` at which the edge towards ``u`` attaches."""
        return psi(self.phi[u], self.n), sigma(self.phi[u], self.n)


@dataclass(frozen=True)
class ReductionStep:
    """One vertex-replacement step.

    ``ports[v]`` lists ``(base_neighbor, local_port)`` for base vertex ``v``;
    the local port is the offset inside ``v``'s block (for tori,
    ``row * n^2 + column``).
    """

    kind: str
    base_n: int
    param: int
    k_out: int
    gadget_size: int
    ports: tuple[tuple[tuple[int, int], ...], ...]
    phi: tuple[int, ...] | None = None
    original_n: int | None = None

    @property
    def out_n(self) -> int:
        return self.base_n * self.gadget_size

    @property
    def layout(self) -> TorusLayout:
        if self.kind != "torus":
            raise InputError(f"{self.kind} step has no torus layout")
        return TorusLayout(self.base_n, self.phi)

    def block(self, v: int) -> range:
        return range(v * self.gadget_size, (v + 1) * self.gadget_size)

    def gadget_of(self, x: int) -> int:
        return x // self.gadget_size

    def base_edges(self) -> list[tuple[int, int]]:
        return sorted({(min(u, w), max(u, w)) for u, plist in enumerate(self.ports) for w, _ in plist})

    def base_graph(self) -> Graph:
        return Graph(self.base_n, self.base_edges())

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "base_n": self.base_n,
            "param": self.param,
            "k_out": self.k_out,
            "gadget_size": self.gadget_size,
        }
        if self.kind == "torus":
            d["phi"] = list(self.phi)
            d["original_n"] = self.original_n
        else:
            d["gadget_base_index"] = [v * self.gadget_size for v in range(self.base_n)]
        d["ports"] = [[list(p) for p in plist] for plist in self.ports]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ReductionStep":
        try:
            kind = d["kind"]
            size = int(d["gadget_size"])
            base_n = int(d["base_n"])
            step = cls(
                kind=kind,
                base_n=base_n,
                param=int(d["param"]),
                k_out=int(d["k_out"]),
                gadget_size=size,
                ports=tuple(tuple((int(a), int(b)) for a, b in plist) for plist in d["ports"]),
                phi=tuple(int(x) for x in d["phi"]) if kind == "torus" else None,
                original_n=int(d["original_n"]) if kind == "torus" else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed trace step: {exc!r}") from exc
        if kind not in ("torus", "fence", "cycle"):
            raise InputError(f"unknown step kind {kind!r}")
        if kind != "torus" and d.get("gadget_base_index") != [v * size for v in range(base_n)]:
            raise InputError("gadget_base_index does not describe contiguous gadget blocks")
        if len(step.ports) != base_n:
            raise InputError(f"ports list has {len(step.ports)} entries, expected {base_n}")
        return step


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple[ReductionStep, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for a, b in zip(self.steps, self.steps[1:]):
            if a.out_n != b.base_n or a.k_out != b.param:
                raise InputError(
                    f"trace steps do not compose: {a.kind} produces n={a.out_n}, k={a.k_out} "
                    f"but {b.kind} expects n={b.base_n}, k={b.param}"
                )

    def then(self, other: "ReductionTrace") -> "ReductionTrace":
        return ReductionTrace(self.steps + other.steps)

    def to_dict(self) -> dict:
        return {"format": "gadgetforge-trace", "version": 1, "steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, d: dict) -> "ReductionTrace":
        if not isinstance(d, dict) or "steps" not in d:
            raise InputError("trace record lacks a 'steps' list")
        return cls(tuple(ReductionStep.from_dict(s) for s in d["steps"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ReductionTrace":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"trace: line {exc.lineno}: {exc.msg}") from exc

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def read(cls, path: str | Path) -> "ReductionTrace":
        try:
            return cls.loads(Path(path).read_text())
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror}") from exc


def _guard(n_vertices: int, max_vertices: int, what: str) -> None:
    if n_vertices > max_vertices:
        raise ResourceLimitError(
            f"{what} would have {n_vertices} vertices, above the cap of {max_vertices} (raise --max-vertices)"
        )


def reduce_clique_to_dks5(
    inst: CliqueInstance, *, max_vertices: int = DEFAULT_MAX_VERTICES
) -> tuple[DksInstance, int, ReductionTrace]:
    """Torus construction; returns ``(instance, threshold, trace)``.

    The base graph is first padded with isolated vertices up to
    :func:`padded_size`.  ``(G, s)`` has an ``s``-clique iff the output
    instance has a solution of value at least ``threshold``.
    """
    s = inst.s
    if s < 2:
        raise InputError(f"clique size must be at least 2, got {s}")
    n = padded_size(inst.graph.n, s)
    _guard(n**5, max_vertices, f"torus instance for n={n}")
    base = pad_graph(inst.graph, n)
    layout = TorusLayout(n, tuple(range(n)))
    side, size = layout.side, layout.torus_size
    local = [layout.port(u) for u in range(n)]
    local = [i * side + j for i, j in local]

    ports = tuple(tuple((u, local[u]) for u in base.adjacency[v]) for v in range(n))
    parts = [torus_edges(side, offset=v * size) for v in range(n)]
    e = base.edge_array
    if len(e):
        inter = np.stack([e[:, 0] * size + np.take(local, e[:, 1]), e[:, 1] * size + np.take(local, e[:, 0])], axis=1)
        parts.append(inter)
    g_star = Graph(n * size, np.concatenate(parts))
    k = s * size
    step = ReductionStep("torus", n, s, k, size, ports, phi=layout.phi, original_n=inst.graph.n)
    return DksInstance(g_star, k, degree_bound=5), clique_threshold(s, n), ReductionTrace((step,))


def _replace_by_gadget(
    inst: DksInstance, kind: str, max_in_degree: int, out_bound: int, max_vertices: int
) -> tuple[DksInstance, ReductionTrace]:
    size, internal, port_order, _ = _GADGETS[kind]
    g = inst.graph
    d = max_degree(g)
    if d > max_in_degree:
        v = int(np.argmax(g.degrees))
        raise InputError(f"{kind} reduction needs max degree <= {max_in_degree}; vertex {v} has degree {d}")
    _guard(size * g.n, max_vertices, f"{kind} instance")
    ports = tuple(
        tuple((u, port_order[idx]) for idx, u in enumerate(g.adjacency[v])) for v in range(g.n)
    )
    port_of = {(v, u): p for v in range(g.n) for u, p in ports[v]}
    offsets = np.arange(g.n, dtype=np.int64)[:, None, None] * size
    parts = [(np.asarray(internal, dtype=np.int64)[None, :, :] + offsets).reshape(-1, 2)]
    if g.m:
        parts.append(
            np.array([(u * size + port_of[(u, v)], v * size + port_of[(v, u)]) for u, v in g.edges], dtype=np.int64)
        )
    g_star = Graph(size * g.n, np.concatenate(parts))
    k_out = size * inst.k
    step = ReductionStep(kind, g.n, inst.k, k_out, size, ports)
    return DksInstance(g_star, k_out, degree_bound=out_bound), ReductionTrace((step,))


def reduce_deg5_to_deg4_fence(inst: DksInstance, *, max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[DksInstance, ReductionTrace]:
    """Fence-gadget replacement; accepts inputs of max degree up to six."""
    return _replace_by_gadget(inst, "fence", 6, 4, max_vertices)


def reduce_deg4_to_deg3_cycle(inst: DksInstance, *, max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[DksInstance, ReductionTrace]:
    return _replace_by_gadget(inst, "cycle", 4, 3, max_vertices)


def reduce_chain(
    inst: DksInstance, kinds: tuple[str, ...] = ("fence", "cycle"), *, max_vertices: int = DEFAULT_MAX_VERTICES
) -> tuple[DksInstance, ReductionTrace]:
    """Apply fence and/or cycle steps in order starting from a DkS instance."""
    scale = {"fence": 8, "cycle": 4}
    predicted = inst.graph.n
    for kind in kinds:
        if kind not in scale:
            raise InputError(f"unknown reduction step {kind!r}")
        predicted *= scale[kind]
        _guard(predicted, max_vertices, f"{kind} level of the chain")
    trace = ReductionTrace()
    for kind in kinds:
        fn = reduce_deg5_to_deg4_fence if kind == "fence" else reduce_deg4_to_deg3_cycle
        inst, t = fn(inst, max_vertices=max_vertices)
        trace = trace.then(t)
    return inst, trace


def reduce_full_chain(
    inst: CliqueInstance, *, max_vertices: int = DEFAULT_MAX_VERTICES
) -> tuple[DksInstance, list[int], ReductionTrace]:
    """Clique -> degree 5 -> degree 4 -> degree 3.

    Returns the final instance, the yes-threshold at each of the three
    levels and the three-step trace.  The size of every level is checked
    against ``max_vertices`` before anything is built.
    """
    if inst.s < 2:
        raise InputError(f"clique size must be at least 2, got {inst.s}")
    n = padded_size(inst.graph.n, inst.s)
    for factor, what in ((1, "torus"), (8, "fence"), (32, "cycle")):
        _guard(factor * n**5, max_vertices, f"{what} level of the chain (n={n})")
    torus_inst, t0, trace = reduce_clique_to_dks5(inst, max_vertices=max_vertices)
    final, rest = reduce_chain(torus_inst, ("fence", "cycle"), max_vertices=max_vertices)
    k1 = 8 * torus_inst.k
    thresholds = [t0, 13 * torus_inst.k + t0, 4 * k1 + 13 * torus_inst.k + t0]
    return final, thresholds, trace.then(rest)


def replay(trace: ReductionTrace, base_graph: Graph, *, max_vertices: int = DEFAULT_MAX_VERTICES) -> list[Graph]:
    """Rebuild the graph at every level: ``[input of step 0, output of step 0, ...]``.

    Raises :class:`InputError` if ``base_graph`` is not the graph the trace was built from.
    """
    graphs = [base_graph]
    g = base_graph
    for step in trace.steps:
        if step.kind == "torus":
            if g.n != step.original_n:
                raise InputError(f"base graph has {g.n} vertices, trace expects {step.original_n}")
            inst, _, t = reduce_clique_to_dks5(CliqueInstance(g, step.param), max_vertices=max_vertices)
        else:
            fn = reduce_deg5_to_deg4_fence if step.kind == "fence" else reduce_deg4_to_deg3_cycle
            inst, t = fn(DksInstance(g, step.param), max_vertices=max_vertices)
        if t.steps[0] != step:
            raise InputError(f"{step.kind} step of the trace does not match the supplied graph")
        g = inst.graph
        graphs.append(g)
    return graphs


def embed_solution(step: ReductionStep, g_star: Graph, base_vertices) -> Solution:
    """Forward map: select every gadget vertex of the given base vertices."""
    size = step.gadget_size
    verts = [x for v in sorted(set(base_vertices)) for x in range(v * size, (v + 1) * size)]
    return Solution.of(g_star, verts)


def gadget_black_counts(step: ReductionStep, vertices) -> np.ndarray:
    idx = np.fromiter(vertices, dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= step.out_n):
        raise InputError(f"vertex index outside 0..{step.out_n - 1}")
    return np.bincount(idx // step.gadget_size, minlength=step.base_n)


def lift_solution(trace: ReductionTrace, level: int, sol: Solution) -> Solution:
    """Map a gadget-complete solution of ``trace.steps[level]``'s output back to its input.

    The returned solution selects exactly the base vertices whose gadgets are
    fully selected; its edge count is taken from the base graph recorded in
    the trace (for torus steps, the padded graph).
    """
    if not 0 <= level < len(trace.steps):
        raise InputError(f"level {level} outside 0..{len(trace.steps) - 1}")
    step = trace.steps[level]
    if len(sol.vertices) != step.k_out:
        raise InputError(f"solution has {len(sol.vertices)} vertices, level {level} expects k={step.k_out}")
    counts = gadget_black_counts(step, sol.vertices)
    partial = np.flatnonzero((counts > 0) & (counts < step.gadget_size))
    if len(partial):
        v = int(partial[0])
        raise PreconditionError(
            f"gadget {v} of the {step.kind} level is only partially selected "
            f"({int(counts[v])}/{step.gadget_size}); run repair first"
        )
    chosen = np.flatnonzero(counts == step.gadget_size).tolist()
    return Solution.of(step.base_graph(), chosen)

