"""Undirected simple graphs, instance types and the two counting primitives.

Vertices are dense indices ``0..n-1``.  Edges are kept as a sorted ``(m, 2)``
integer array with ``u < v`` in every row, which makes equality, hashing and
serialization canonical.  Graphs are immutable; every transformation builds a
new one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "Graph",
    "CliqueInstance",
    "DksInstance",
    "Solution",
    "vertex_mask",
    "induced_edge_count",
    "cut_edge_count",
    "max_degree",
]


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``."""

    def __init__(self, n: int, edges: Iterable[Sequence[int]] | np.ndarray = (), *, validate: bool = True):
        if n < 0:
            raise InputError(f"vertex count must be nonnegative, got {n}")
        arr = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InputError("edges must be pairs of vertex indices")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        if validate and len(arr):
            if lo.min() < 0 or hi.max() >= n:
                bad = int(np.flatnonzero((lo < 0) | (hi >= n))[0])
                raise InputError(f"edge {tuple(arr[bad])} has an endpoint outside 0..{n - 1}")
            loops = np.flatnonzero(lo == hi)
            if len(loops):
                raise InputError(f"self-loop at vertex {int(lo[loops[0]])}")
        canon = np.stack([lo, hi], axis=1)
        order = np.lexsort((canon[:, 1], canon[:, 0]))
        canon = canon[order]
        if validate and len(canon) > 1:
            dup = np.flatnonzero(np.all(canon[1:] == canon[:-1], axis=1))
            if len(dup):
                u, v = canon[dup[0]]
                raise InputError(f"duplicate edge ({int(u)}, {int(v)})")
        canon.setflags(write=False)
        self._n = int(n)
        self._edges = canon

    @property
    def vertex_count(self) -> int:
        return self._n

    n = vertex_count

    @property
    def edge_count(self) -> int:
        return int(self._edges.shape[0])

    m = edge_count

    @property
    def edge_array(self) -> np.ndarray:
        """Read-only ``(m, 2)`` array of edges, rows sorted, ``u < v``."""
        return self._edges

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((int(u), int(v)) for u, v in self._edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self._edges.ravel(), minlength=self._n).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Per-vertex sorted neighbor tuples."""
        e = self._edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        dst = dst[order].tolist()
        bounds = np.concatenate([[0], np.cumsum(self.degrees)]).tolist()
        return tuple(tuple(dst[bounds[v]:bounds[v + 1]]) for v in range(self._n))

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._edges, other._edges)

    def __hash__(self) -> int:
        return hash((self._n, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.edge_count})"


def vertex_mask(g: Graph, s: Iterable[int] | np.ndarray) -> np.ndarray:
    """Boolean membership mask for ``s``; rejects out-of-range indices."""
    if isinstance(s, np.ndarray) and s.dtype == bool:
        if s.shape != (g.n,):
            raise InputError(f"mask has shape {s.shape}, expected ({g.n},)")
        return s
    idx = np.fromiter(s, dtype=np.int64) if not isinstance(s, np.ndarray) else s.astype(np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= g.n):
        raise InputError(f"vertex index outside 0..{g.n - 1}")
    mask = np.zeros(g.n, dtype=bool)
    mask[idx] = True
    return mask


def induced_edge_count(g: Graph, s) -> int:
    """Number of edges with both endpoints in ``s``."""
    mask = vertex_mask(g, s)
    e = g.edge_array
    return int(np.count_nonzero(mask[e[:, 0]] & mask[e[:, 1]]))


def cut_edge_count(g: Graph, s) -> int:
    """Number of edges with exactly one endpoint in ``s``."""
    mask = vertex_mask(g, s)
    e = g.edge_array
    return int(np.count_nonzero(mask[e[:, 0]] ^ mask[e[:, 1]]))


def max_degree(g: Graph) -> int:
    return int(g.degrees.max()) if g.n else 0


@dataclass(frozen=True)
class CliqueInstance:
    graph: Graph
    s: int

    def __post_init__(self):
        if not 1 <= self.s <= self.graph.n:
            raise InputError(f"clique size s={self.s} must satisfy 1 <= s <= {self.graph.n}")


@dataclass(frozen=True)
class DksInstance:
    graph: Graph
    k: int
    degree_bound: int | None = None

    def __post_init__(self):
        if not 0 <= self.k <= self.graph.n:
            raise InputError(f"k={self.k} must satisfy 0 <= k <= {self.graph.n}")
        if self.degree_bound is not None and max_degree(self.graph) > self.degree_bound:
            v = int(np.argmax(self.graph.degrees))
            raise InputError(
                f"vertex {v} has degree {self.graph.degree(v)}, above the declared bound {self.degree_bound}"
            )


@dataclass(frozen=True)
class Solution:
    """A sorted vertex set together with its induced edge count."""

    vertices: tuple[int, ...]
    edge_count: int

    @classmethod
    def of(cls, g: Graph, vertices: Iterable[int]) -> "Solution":
        vs = tuple(sorted({int(v) for v in vertices}))
        return cls(vs, induced_edge_count(g, vs))

    @property
    def k(self) -> int:
        return len(self.vertices)

    def check(self, g: Graph, k: int | None = None) -> None:
        """Raise :class:`InputError` unless this solution is consistent with ``g`` (and ``k``)."""
        if k is not None and len(self.vertices) != k:
            raise InputError(f"solution has {len(self.vertices)} vertices, expected k={k}")
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("solution repeats a vertex")
        actual = induced_edge_count(g, self.vertices)
        if actual != self.edge_count:
            raise InputError(f"solution claims {self.edge_count} induced edges, graph has {actual}")
