"""Redistribution of black vertices on torus-reduced graphs."""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from ..graph import Graph, Solution, induced_edge_count
from ..reductions import ReductionTrace, gadget_black_counts
from .coloring import RepairReport, select_step

__all__ = ["repair_torus", "classify_tori"]


def classify_tori(counts: np.ndarray, n: int) -> np.ndarray:
    """True for large tori: more than ``n^4 - n^3`` black vertices."""
    return counts > n**4 - n**3


def repair_torus(
    g_star: Graph, trace: ReductionTrace, sol: Solution, *, level: int | None = 0, strict: bool = False
) -> tuple[Solution, RepairReport]:
    """Turn a solution of ``s * n^4`` vertices into a union of ``s`` complete tori.

    Large tori are completed first (most black vertices first, ties by torus
    id); the remaining budget fills further tori in the same order.  The
    result has no cut edges.  A drop in the induced edge count is reported as
    a violation: it means the instance is below the size where small tori are
    guaranteed to have enough cut edges.
    """
    step = select_step(trace, level, "torus")
    if g_star.n != step.out_n:
        raise InputError(f"graph has {g_star.n} vertices, the torus level has {step.out_n}")
    if len(sol.vertices) != step.k_out:
        raise InputError(f"solution has {len(sol.vertices)} vertices, expected k={step.k_out}")
    n, s, size = step.base_n, step.param, step.gadget_size
    before = np.zeros(g_star.n, dtype=bool)
    before[list(sol.vertices)] = True
    report = RepairReport(initial_edges=induced_edge_count(g_star, before), strict=strict)

    counts = gadget_black_counts(step, sol.vertices)
    large = classify_tori(counts, n)
    order = sorted(range(n), key=lambda v: (-int(large[v]), -int(counts[v]), v))
    chosen = sorted(order[:s])
    report.notes = {
        "black_per_torus": counts.tolist(),
        "large_tori": np.flatnonzero(large).tolist(),
        "chosen_tori": chosen,
    }
    if int(large.sum()) > s:
        report.violation("too-many-large-tori", large=int(large.sum()), s=s, n=n)

    after = np.zeros(g_star.n, dtype=bool)
    for v in chosen:
        after[v * size:(v + 1) * size] = True
    to_white = np.flatnonzero(before & ~after).tolist()
    to_black = np.flatnonzero(after & ~before).tolist()
    final = induced_edge_count(g_star, after)
    delta = final - report.initial_edges
    if to_white or to_black:
        report.log("redistribute", to_white, to_black, delta)
        report.iterations = 1
    if delta < 0:
        report.violation("redistribute-lost-edges", delta=delta, n=n)
    report.final_edges = final
    return Solution(tuple(np.flatnonzero(after).tolist()), final), report
