"""Brute-force checks of the cut facts and of end-to-end reduction correctness.

Every check returns a :class:`Report` with the stable schema
``{check, params, status, witnesses}``; ``status`` is ``"PASS"`` or ``"FAIL"``
(``"SKIPPED"`` entries only appear inside witnesses).
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ResourceLimitError
from .generators import gen_grid, gen_torus
from .graph import DksInstance, Graph, Solution, vertex_mask
from .reductions import (
    ReductionTrace,
    reduce_deg4_to_deg3_cycle,
    reduce_deg5_to_deg4_fence,
)
from .repair.coloring import Coloring, RepairReport, select_step
from .repair.fence import assert_fence_claim, enforce_property1, enforce_property2, property1_holds
from .solver import DEFAULT_ENUMERATION_CAP, solve_bruteforce

__all__ = [
    "Report",
    "SAMPLE_SEED",
    "EXHAUSTIVE_LIMIT",
    "threads",
    "subset_cut_counts",
    "verify_grid_cut_fact",
    "verify_torus_dominates_grid",
    "verify_cut_vs_intertorus",
    "verify_reduction_equivalence",
    "verify_fence_claim",
    "all_graphs",
    "connected_graphs",
]

SAMPLE_SEED = 0xD5C0
EXHAUSTIVE_LIMIT = 25  # vertices; 2^25 subsets
_CHUNK_BITS = 20


@dataclass
class Report:
    check: str
    params: dict
    status: str
    witnesses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_dict(self) -> dict:
        return {"check": self.check, "params": self.params, "status": self.status, "witnesses": self.witnesses}


def threads() -> int:
    try:
        return max(1, int(os.environ.get("GADGETFORGE_THREADS", "1")))
    except ValueError:
        return 1


def _odd_side(N: int) -> None:
    if N < 3 or N % 2 == 0:
        raise InputError(f"N must be an odd integer >= 3, got {N}")


def _fact_bound(N: int, x: int) -> int:
    return math.ceil(2 * min(x, N * N - x) / (N - 1))


def subset_cut_counts(g: Graph, masks: np.ndarray) -> np.ndarray:
    """Cut size of every subset in ``masks`` (bit ``v`` set = vertex ``v`` selected); needs ``g.n <= 62``."""
    e = g.edge_array
    diff = e[:, 1] - e[:, 0]
    out = np.zeros(len(masks), dtype=np.int64)
    for d in np.unique(diff).tolist():
        lows = e[diff == d, 0]
        sel = int(np.bitwise_or.reduce(np.left_shift(np.int64(1), lows)))
        out += np.bitwise_count((masks ^ (masks >> d)) & sel)
    return out


def _exhaustive_minima(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Per subset size, the minimum cut over all subsets and the first mask attaining it."""
    n = g.n
    total = 1 << n
    chunk = min(total, 1 << _CHUNK_BITS)

    def work(start: int):
        masks = np.arange(start, start + chunk, dtype=np.int64)
        pop = np.bitwise_count(masks).astype(np.int64)
        cut = subset_cut_counts(g, masks)
        key = cut * (total << 1) + masks  # orders by cut, then by mask
        mins = np.full(n + 1, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(mins, pop, key)
        return mins

    starts = range(0, total, chunk)
    if threads() > 1:
        with ThreadPoolExecutor(threads()) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    best = np.minimum.reduce(parts)
    return best // (total << 1), best % (total << 1)


def _sampled_minima(g: Graph, samples: int, seed: int) -> tuple[np.ndarray, list[list[int]]]:
    rng = np.random.default_rng(seed)
    n = g.n
    e = g.edge_array
    mins = np.zeros(n + 1, dtype=np.int64)
    wits: list[list[int]] = []
    for x in range(n + 1):
        order = np.argsort(rng.random((samples, n)), axis=1)
        member = np.zeros((samples, n), dtype=bool)
        np.put_along_axis(member, order[:, :x], True, axis=1)
        cut = np.count_nonzero(member[:, e[:, 0]] ^ member[:, e[:, 1]], axis=1)
        i = int(np.argmin(cut))
        mins[x] = cut[i]
        wits.append(np.flatnonzero(member[i]).tolist())
    return mins, wits


def _mask_vertices(mask: int, n: int) -> list[int]:
    return [v for v in range(n) if mask >> v & 1]


def verify_grid_cut_fact(N: int, *, samples: int = 2000, seed: int = SAMPLE_SEED) -> Report:
    """Removing ``x`` vertices from the odd ``N x N`` grid cuts at least ``ceil(2 min(x, N^2-x)/(N-1))`` edges.

    Exhaustive over all ``2^(N^2)`` subsets when ``N^2 <= 25``; otherwise
    ``samples`` random subsets per ``x`` (a sampled PASS only means no
    counterexample was found).
    """
    _odd_side(N)
    g = gen_grid(N)
    exhaustive = N * N <= EXHAUSTIVE_LIMIT
    params = {"N": N, "mode": "exhaustive" if exhaustive else "sampled"}
    if exhaustive:
        mins, masks = _exhaustive_minima(g)
        params["subsets"] = 1 << (N * N)
        wit_sets = [_mask_vertices(int(m), N * N) for m in masks]
    else:
        mins, wit_sets = _sampled_minima(g, samples, seed)
        params.update(samples_per_x=samples, seed=seed)
    witnesses = []
    ok = True
    for x in range(N * N + 1):
        bound = _fact_bound(N, x)
        holds = int(mins[x]) >= bound
        ok &= holds
        witnesses.append({"x": x, "bound": bound, "min_cut": int(mins[x]), "holds": holds, "argmin": wit_sets[x]})
    return Report("grid-cut", params, "PASS" if ok else "FAIL", witnesses)


def verify_torus_dominates_grid(N: int) -> Report:
    """For every vertex subset the torus cut is at least the grid cut on the same ``N x N`` vertex set.

    Also reports whether the grid-cut bound therefore holds for the torus.
    """
    _odd_side(N)
    if N * N > EXHAUSTIVE_LIMIT:
        raise ResourceLimitError(f"exhaustive comparison needs N^2 <= {EXHAUSTIVE_LIMIT}")
    grid, torus = gen_grid(N), gen_torus(N)
    total = 1 << (N * N)
    chunk = min(total, 1 << _CHUNK_BITS)
    worst = None
    checked = 0
    for start in range(0, total, chunk):
        masks = np.arange(start, start + chunk, dtype=np.int64)
        gap = subset_cut_counts(torus, masks) - subset_cut_counts(grid, masks)
        checked += len(masks)
        i = int(np.argmin(gap))
        if worst is None or gap[i] < worst[0]:
            worst = (int(gap[i]), int(masks[i]))
    tmins, _ = _exhaustive_minima(torus)
    transfer = [
        {"x": x, "bound": _fact_bound(N, x), "torus_min_cut": int(tmins[x]), "holds": int(tmins[x]) >= _fact_bound(N, x)}
        for x in range(N * N + 1)
    ]
    ok = worst[0] >= 0 and all(t["holds"] for t in transfer)
    witnesses = [{"min_gap": worst[0], "at": _mask_vertices(worst[1], N * N)}] + transfer
    return Report("torus-dominates-grid", {"N": N, "mode": "exhaustive", "subsets": checked}, "PASS" if ok else "FAIL", witnesses)


def verify_cut_vs_intertorus(g_star: Graph, trace: ReductionTrace, sol: Solution | Coloring, *, level: int = 0) -> Report:
    """Per small torus, compare cut edges with inter-torus edges at its black vertices.

    The cut/inter-torus ratio is only promised for large enough ``n``; this
    records what happens on the given instance.  Tori with more than
    ``n^4 - n^3`` black vertices are listed as not applicable.
    """
    step = select_step(trace, level, "torus")
    black = vertex_mask(g_star, sol.black_vertices() if isinstance(sol, Coloring) else sol.vertices)
    size, n = step.gadget_size, step.base_n
    e = g_star.edge_array
    tu, tv = e[:, 0] // size, e[:, 1] // size
    bu, bv = black[e[:, 0]], black[e[:, 1]]
    intra = tu == tv
    cut = np.bincount(tu[intra & (bu ^ bv)], minlength=n)
    inter = np.bincount(tu[~intra & bu], minlength=n) + np.bincount(tv[~intra & bv], minlength=n)
    counts = np.bincount(np.flatnonzero(black) // size, minlength=n)
    small_limit = n**4 - n**3
    witnesses = []
    ok = True
    for v in range(n):
        rec = {"torus": v, "black": int(counts[v]), "cut": int(cut[v]), "inter_torus": int(inter[v])}
        if counts[v] > small_limit:
            rec["small"] = False
        else:
            rec["small"] = True
            rec["holds"] = bool(cut[v] >= 2 * inter[v])
            ok &= rec["holds"]
        witnesses.append(rec)
    return Report("cut-vs-intertorus", {"n": n, "s": step.param, "small_limit": small_limit}, "PASS" if ok else "FAIL", witnesses)


def all_graphs(n: int):
    """Every labeled simple graph on ``n`` vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        yield Graph(n, [p for i, p in enumerate(pairs) if bits >> i & 1])


def connected_graphs(n: int):
    for g in all_graphs(n):
        if n <= 1:
            yield g
            continue
        seen, todo = {0}, [0]
        while todo:
            for u in g.adjacency[todo.pop()]:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        if len(seen) == n:
            yield g


def verify_reduction_equivalence(
    level: str, corpus, *, cap: int = DEFAULT_ENUMERATION_CAP, budget_secs: float | None = 60.0
) -> Report:
    """Check ``OPT(G*, size*k) = internal*k + OPT(G, k)`` by brute force on both sides.

    ``corpus`` yields ``(graph, k)`` pairs.  Instances that hit the cap or the
    budget are listed as skipped, never counted as passing.
    """
    reducers = {"fence": (reduce_deg5_to_deg4_fence, 13), "cycle": (reduce_deg4_to_deg3_cycle, 4)}
    if level not in reducers:
        raise InputError(f"unknown level {level!r}; expected 'fence' or 'cycle'")
    reduce, per_gadget = reducers[level]
    witnesses = []
    ok = True
    checked = skipped = 0
    for g, k in corpus:
        rec = {"n": g.n, "edges": [list(e) for e in g.edges], "k": k}
        try:
            red, _ = reduce(DksInstance(g, k))
            base_opt = solve_bruteforce(DksInstance(g, k), cap=cap, budget_secs=budget_secs).edge_count
            red_opt = solve_bruteforce(red, cap=cap, budget_secs=budget_secs).edge_count
        except ResourceLimitError as exc:
            rec.update(status="SKIPPED", reason=str(exc))
            skipped += 1
            witnesses.append(rec)
            continue
        holds = red_opt == per_gadget * k + base_opt
        ok &= holds
        checked += 1
        rec.update(status="PASS" if holds else "FAIL", base_opt=base_opt, reduced_opt=red_opt)
        witnesses.append(rec)
    params = {"level": level, "checked": checked, "skipped": skipped}
    return Report(f"{level}-equivalence", params, "PASS" if ok and checked else "FAIL", witnesses)


def verify_fence_claim(*, external: bool = False) -> Report:
    """Enumerate every coloring of one fence gadget, normalize it and check the claim.

    With ``external=True`` the gadget sits in the middle of a star so that
    every outer vertex has an outside neighbour, and all ``2^6`` colorings of
    those neighbours are combined with the ``2^8`` gadget colorings.
    """
    if external:
        base = Graph(7, [(0, i) for i in range(1, 7)])
        ports = [8 * u for u in range(1, 7)]
    else:
        base = Graph(1)
        ports = []
    inst, trace = reduce_deg5_to_deg4_fence(DksInstance(base, 1))
    g = inst.graph
    witnesses = []
    ok = True
    total = 0
    for pattern in range(1 << len(ports)):
        outside = [p for i, p in enumerate(ports) if pattern >> i & 1]
        for local in range(256):
            total += 1
            start = Coloring(g, [i for i in range(8) if local >> i & 1] + outside)
            report = RepairReport(initial_edges=start.edges)
            col = enforce_property1(g, trace, start, report=report)
            col = enforce_property2(g, trace, col, report=report)
            failures = [v["kind"] for v in report.violations]
            if not property1_holds(col, 0):
                failures.append("property1 lost")
            if col.edges < start.edges:
                failures.append("edges lost")
            try:
                assert_fence_claim(g, trace, col)
            except AssertionError as exc:
                failures.append(str(exc))
            if failures:
                ok = False
                witnesses.append({"coloring": local, "outside": pattern, "failures": failures})
    params = {"external": external, "colorings": total}
    return Report("fence-claim", params, "PASS" if ok else "FAIL", witnesses)
