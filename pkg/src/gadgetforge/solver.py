"""Exact Densest-k-Subgraph solvers used as ground truth.

Both exact solvers return the lexicographically smallest optimal vertex set
(comparing sorted tuples), so their answers can be compared verbatim.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np

from .errors import InputError, ResourceLimitError, SolverTimeout
from .graph import DksInstance, Graph, Solution
from .reductions import ReductionTrace, embed_solution

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "DEFAULT_BUDGET_SECS",
    "solve_bruteforce",
    "solve_branch_bound",
    "solve_threshold",
    "solve",
    "solve_gadget_restricted",
]

DEFAULT_ENUMERATION_CAP = 10**9
DEFAULT_BUDGET_SECS = 60.0
_CHUNK = 1 << 16


def _neighbor_masks(g: Graph) -> list[int]:
    masks = [0] * g.n
    for u, v in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _chunks(n: int, k: int):
    combos = itertools.combinations(range(n), k)
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)), dtype=np.int64)
        if flat.size == 0:
            return
        yield flat.reshape(-1, k)


def _scan(g: Graph, k: int, threshold: int | None, cap: int, budget_secs: float | None):
    """Enumerate all k-subsets in lexicographic order.

    Returns ``(best_value, best_set)``; with a threshold, stops at the first
    set reaching it (or returns ``(None, None)`` if none does).
    """
    total = math.comb(g.n, k)
    if total > cap:
        raise ResourceLimitError(f"C({g.n},{k}) = {total} subsets exceeds the enumeration cap {cap}")
    deadline = None if budget_secs is None else time.monotonic() + budget_secs
    if k == 0:
        if threshold is not None and threshold > 0:
            return None, None
        return 0, ()
    if g.n > 62:
        return _scan_python(g, k, threshold, deadline)
    adj = np.array(_neighbor_masks(g), dtype=np.int64)
    best_val, best_set = -1, None
    for combos in _chunks(g.n, k):
        if deadline is not None and time.monotonic() > deadline:
            raise SolverTimeout(f"brute force exceeded its budget of {budget_secs} s")
        member = np.bitwise_or.reduce(np.left_shift(1, combos), axis=1)
        twice = np.zeros(len(combos), dtype=np.int64)
        for col in combos.T:
            twice += np.bitwise_count(adj[col] & member)
        values = twice // 2
        if threshold is not None:
            hits = np.flatnonzero(values >= threshold)
            if len(hits):
                i = int(hits[0])
                return int(values[i]), tuple(combos[i].tolist())
            continue
        i = int(np.argmax(values))
        if values[i] > best_val:
            best_val, best_set = int(values[i]), tuple(combos[i].tolist())
    if threshold is not None:
        return None, None
    return best_val, best_set


def _scan_python(g: Graph, k: int, threshold: int | None, deadline: float | None):
    adj = _neighbor_masks(g)
    best_val, best_set = -1, None
    for i, combo in enumerate(itertools.combinations(range(g.n), k)):
        if deadline is not None and i % 4096 == 0 and time.monotonic() > deadline:
            raise SolverTimeout("brute force exceeded its budget")
        mask = 0
        for v in combo:
            mask |= 1 << v
        val = sum((adj[v] & mask).bit_count() for v in combo) // 2
        if threshold is not None and val >= threshold:
            return val, combo
        if val > best_val:
            best_val, best_set = val, combo
    if threshold is not None:
        return None, None
    return best_val, best_set


def solve_bruteforce(
    inst: DksInstance, *, cap: int = DEFAULT_ENUMERATION_CAP, budget_secs: float | None = None
) -> Solution:
    """Enumerate every k-subset; the reference oracle."""
    val, best = _scan(inst.graph, inst.k, None, cap, budget_secs)
    return Solution(best, val)


class _Search:
    """Include-first depth-first search over vertices in index order.

    Leaves are reached in lexicographic order of the chosen sets, so keeping
    only strict improvements (and pruning on ``bound <= best``) yields the
    lexicographically smallest optimum.
    """

    def __init__(self, g: Graph, k: int, budget_secs: float | None):
        self.n = g.n
        self.k = k
        self.adj = _neighbor_masks(g)
        self.deadline = None if budget_secs is None else time.monotonic() + budget_secs
        self.budget = budget_secs
        self.nodes = 0
        self.best_val = -1
        self.best_set: tuple[int, ...] | None = None
        self.target: int | None = None

    def bound(self, i: int, chosen: int, edges: int, r: int) -> int:
        """Upper bound on the value reachable by adding ``r`` vertices from ``i..n-1``.

        Each candidate ``v`` contributes at most ``a(v)`` edges to the chosen
        set plus half of ``min(b(v), r - 1)`` edges among the added vertices,
        where ``a``/``b`` count neighbours in the chosen set / the remaining
        candidates.  Summing the ``r`` largest such contributions bounds
        the gain.
        """
        if r == 0:
            return edges
        rest = ((1 << self.n) - 1) >> i << i
        weights = []
        for v in range(i, self.n):
            m = self.adj[v]
            weights.append(2 * (m & chosen).bit_count() + min((m & rest).bit_count(), r - 1))
        weights.sort(reverse=True)
        return edges + sum(weights[:r]) // 2

    def run(self, i: int = 0, chosen: int = 0, count: int = 0, edges: int = 0) -> bool:
        self.nodes += 1
        if self.deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise SolverTimeout(f"branch and bound exceeded its budget of {self.budget} s")
        r = self.k - count
        if r == 0:
            if self.target is not None:
                if edges >= self.target:
                    self.best_val, self.best_set = edges, self._decode(chosen)
                    return True
                return False
            if edges > self.best_val:
                self.best_val, self.best_set = edges, self._decode(chosen)
            return False
        if self.n - i < r:
            return False
        ub = self.bound(i, chosen, edges, r)
        if self.target is not None:
            if ub < self.target:
                return False
        elif ub <= self.best_val:
            return False
        gain = (self.adj[i] & chosen).bit_count()
        if self.run(i + 1, chosen | (1 << i), count + 1, edges + gain):
            return True
        return self.run(i + 1, chosen, count, edges)

    def _decode(self, mask: int) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if mask >> v & 1)


def solve_branch_bound(inst: DksInstance, *, budget_secs: float | None = DEFAULT_BUDGET_SECS) -> Solution:
    search = _Search(inst.graph, inst.k, budget_secs)
    search.run()
    return Solution(search.best_set, search.best_val)


def solve_threshold(
    inst: DksInstance, t: int, *, solver: str = "bb", budget_secs: float | None = DEFAULT_BUDGET_SECS,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Solution | None:
    """Some solution of value at least ``t``, or ``None`` if provably none exists."""
    if solver == "brute":
        val, best = _scan(inst.graph, inst.k, t, cap, budget_secs)
        return None if best is None else Solution(best, val)
    if solver != "bb":
        raise InputError(f"unknown solver {solver!r}")
    search = _Search(inst.graph, inst.k, budget_secs)
    search.target = t
    return Solution(search.best_set, search.best_val) if search.run() else None


def solve(inst: DksInstance, *, solver: str = "bb", budget_secs: float | None = DEFAULT_BUDGET_SECS,
          cap: int = DEFAULT_ENUMERATION_CAP) -> Solution:
    if solver == "brute":
        return solve_bruteforce(inst, cap=cap, budget_secs=budget_secs)
    if solver == "bb":
        return solve_branch_bound(inst, budget_secs=budget_secs)
    raise InputError(f"unknown solver {solver!r}")


def solve_gadget_restricted(
    g_star: Graph, trace: ReductionTrace, k_prime: int, *, level: int | None = None, solver: str = "bb",
    budget_secs: float | None = DEFAULT_BUDGET_SECS,
) -> Solution:
    """Best solution of ``(g_star, k_prime)`` that takes whole gadgets only.

    Solves the base instance recorded in the trace and maps the optimum
    forward, so its value is the base optimum plus the internal edges of
    the selected gadgets.
    """
    if not trace.steps:
        raise InputError("empty trace")
    idx = len(trace.steps) - 1 if level is None else level
    step = trace.steps[idx]
    if g_star.n != step.out_n:
        raise InputError(f"graph has {g_star.n} vertices, level {idx} has {step.out_n}")
    if k_prime % step.gadget_size:
        raise InputError(f"k'={k_prime} is not a multiple of the gadget size {step.gadget_size}")
    base_k = k_prime // step.gadget_size
    base = DksInstance(step.base_graph(), base_k)
    best = solve(base, solver=solver, budget_secs=budget_secs)
    return embed_solution(step, g_star, best.vertices)
