"""Deterministic graph generators.

All random generators take an explicit seed and draw only from a private
``random.Random`` so that output is a pure function of the arguments.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from .errors import InputError
from .graph import Graph

__all__ = [
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "grid_edges",
    "torus_edges",
    "gen_grid",
    "gen_torus",
    "gen_random_degree_bounded",
    "gen_planted_clique",
]


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def grid_edges(side: int, offset: int = 0) -> np.ndarray:
    """Edges of the ``side x side`` grid; vertex ``(i, j)`` has index ``offset + i*side + j``."""
    idx = np.arange(side * side, dtype=np.int64).reshape(side, side) + offset
    horiz = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    vert = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return np.concatenate([horiz, vert])


def torus_edges(side: int, offset: int = 0) -> np.ndarray:
    """Edges of the ``side x side`` torus: ``(i, j)`` joins ``(i+1 mod side, j)`` and ``(i, j+1 mod side)``."""
    if side < 3:
        raise InputError(f"torus side must be at least 3 (side {side} would create multi-edges)")
    idx = np.arange(side * side, dtype=np.int64).reshape(side, side) + offset
    down = np.stack([idx.ravel(), np.roll(idx, -1, axis=0).ravel()], axis=1)
    right = np.stack([idx.ravel(), np.roll(idx, -1, axis=1).ravel()], axis=1)
    return np.concatenate([down, right])


def gen_grid(N: int) -> Graph:
    if N < 1:
        raise InputError(f"grid side must be positive, got {N}")
    return Graph(N * N, grid_edges(N))


def gen_torus(N: int) -> Graph:
    return Graph(N * N, torus_edges(N))


def gen_random_degree_bounded(n: int, d_max: int, target_m: int, seed: int, *, attempts: int = 50) -> Graph:
    """Random simple graph with exactly ``target_m`` edges and max degree ``<= d_max``.

    Edges are added greedily from a shuffled pair list; if that stalls below
    ``target_m`` the remaining deficit is closed with degree-preserving
    edge switches.
    """
    if n < 0 or d_max < 0 or target_m < 0:
        raise InputError("n, d_max and target_m must be nonnegative")
    if target_m > n * d_max // 2 or target_m > n * (n - 1) // 2:
        raise InputError(f"no simple graph on {n} vertices has {target_m} edges with max degree {d_max}")
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(n), 2))
    for _ in range(attempts):
        rng.shuffle(pairs)
        adj: list[set[int]] = [set() for _ in range(n)]
        m = 0
        for u, v in pairs:
            if m == target_m:
                break
            if len(adj[u]) < d_max and len(adj[v]) < d_max:
                adj[u].add(v)
                adj[v].add(u)
                m += 1
        if m < target_m:
            m += _close_deficit(adj, d_max, target_m - m, rng)
        if m == target_m:
            return Graph(n, [(u, v) for u in range(n) for v in adj[u] if u < v])
    raise InputError(f"could not realize {target_m} edges with max degree {d_max} on {n} vertices")


def _close_deficit(adj: list[set[int]], d_max: int, deficit: int, rng: random.Random) -> int:
    added = 0
    n = len(adj)
    while added < deficit:
        slack = [v for v in range(n) if len(adj[v]) < d_max]
        pair = next(((u, v) for u, v in itertools.combinations(slack, 2) if v not in adj[u]), None)
        if pair is not None:
            u, v = pair
            adj[u].add(v)
            adj[v].add(u)
            added += 1
            continue
        # switch: drop a-b, add u-a and v-b (u == v allowed with two spare slots)
        cands = list(itertools.combinations(slack, 2)) + [(u, u) for u in slack if len(adj[u]) <= d_max - 2]
        edges = [(x, y) for x in range(n) for y in sorted(adj[x]) if x < y]
        edges += [(y, x) for x, y in edges]
        rng.shuffle(cands)
        rng.shuffle(edges)
        move = next(
            (
                (u, v, a, b)
                for u, v in cands
                for a, b in edges
                if {a, b}.isdisjoint((u, v)) and a not in adj[u] and b not in adj[v]
            ),
            None,
        )
        if move is None:
            return added
        u, v, a, b = move
        adj[a].discard(b)
        adj[b].discard(a)
        adj[u].add(a)
        adj[a].add(u)
        adj[v].add(b)
        adj[b].add(v)
        added += 1
    return added


def gen_planted_clique(n: int, s: int, extra_m: int, seed: int) -> tuple[Graph, tuple[int, ...]]:
    """Graph containing a clique on ``s`` random vertices plus ``extra_m`` random extra edges.

    The extra edges may create further cliques of size ``s`` or larger; only
    the presence of the planted one is guaranteed.
    """
    if not 0 <= s <= n:
        raise InputError(f"planted clique size {s} must lie in 0..{n}")
    free = n * (n - 1) // 2 - s * (s - 1) // 2
    if not 0 <= extra_m <= free:
        raise InputError(f"extra_m={extra_m} exceeds the {free} available non-clique pairs")
    rng = random.Random(seed)
    planted = tuple(sorted(rng.sample(range(n), s)))
    clique = set(itertools.combinations(planted, 2))
    others = [p for p in itertools.combinations(range(n), 2) if p not in clique]
    extra = rng.sample(others, extra_m)
    return Graph(n, sorted(clique) + extra), planted
