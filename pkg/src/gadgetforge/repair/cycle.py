"""Canonicalization of solutions on cycle-reduced graphs (gadget = 4-cycle)."""

from __future__ import annotations

from ..errors import GadgetForgeError
from ..graph import Graph, Solution
from ..reductions import ReductionTrace
from .coloring import Coloring, RepairReport, select_step, start

__all__ = ["repair_cycle"]

SIZE = 4


def _members(col: Coloring, g: int, black: bool) -> list[int]:
    return [v for v in range(g * SIZE, (g + 1) * SIZE) if bool(col.color[v]) == black]


def _apply(col: Coloring, report: RepairReport, kind: str, donors, targets, gadget: int) -> None:
    delta = col.recolor(donors, targets)
    report.log(kind, donors, targets, delta, gadget)
    if delta < 0:
        report.violation(f"{kind}-lost-edges", gadget=gadget, to_white=sorted(donors), to_black=sorted(targets), delta=delta)


def _best(col: Coloring, options):
    """Highest-delta option; ``options`` is an ordered iterable of (donors, targets, gadget)."""
    scored = [(col.copy().recolor(d, t), -i, d, t, g) for i, (d, t, g) in enumerate(options)]
    if not scored:
        return None
    delta, _, d, t, g = max(scored)
    return d, t, g


def repair_cycle(
    g_star: Graph, trace: ReductionTrace, sol: Solution, *, level: int | None = None, strict: bool = False
) -> tuple[Solution, RepairReport]:
    """Make every cycle gadget fully black or fully white without losing edges.

    Moves, in priority order:

    * evacuate: the black vertex of a gadget with a single black vertex moves
      into the fullest other incomplete gadget;
    * feed: a gadget with three black vertices receives a vertex of
      black-degree at most two from another incomplete gadget;
    * merge: with only two-black gadgets left, both black vertices of one move
      into another.
    """
    step = select_step(trace, level, "cycle")
    col, report = start(g_star, step, sol, strict)
    k = step.param
    while True:
        counts = col.gadget_counts(step)
        incomplete = [g for g, c in enumerate(counts) if 0 < c < SIZE]
        if not incomplete:
            break
        if len(incomplete) == 1:
            raise GadgetForgeError(f"internal: gadget {incomplete[0]} is the only incomplete gadget")

        singles = [g for g in incomplete if counts[g] == 1]
        if singles:
            g = singles[0]
            (x,) = _members(col, g, True)
            h = min((h for h in incomplete if h != g), key=lambda h: (-counts[h], h))
            options = [([x], [w], h) for w in _members(col, h, False)]
            donors, targets, _ = _best(col, options)
            _apply(col, report, "evacuate", donors, targets, g)
            if counts[h] + 1 == SIZE:
                report.iterations += 1
            continue

        triples = [g for g in incomplete if counts[g] == 3]
        if triples:
            g = triples[0]
            targets = _members(col, g, False)
            h = next(h for h in incomplete if h != g)
            donors = [v for v in _members(col, h, True) if col.bdeg[v] <= 2][:1]
            if not donors:
                report.violation("feed-missing-witness", gadget=g, donor_gadget=h)
            elif col.copy().recolor(donors, targets) < 0:
                report.violation("feed-lost-edges", gadget=g, donor=donors[0])
                donors = []
            if not donors:
                options = [([v], targets, g) for h2 in incomplete if h2 != g for v in _members(col, h2, True)]
                donors, targets, _ = _best(col, options)
            kind = "feed"
        else:
            g, h = incomplete[0], incomplete[1]
            donors, targets = _members(col, h, True), _members(col, g, False)
            if col.copy().recolor(donors, targets) < 0:
                report.violation("merge-lost-edges", gadget=g, donor_gadget=h)
                options = [
                    (_members(col, b, True), _members(col, a, False), a)
                    for a in incomplete for b in incomplete if a != b
                ]
                donors, targets, g = _best(col, options)
            kind = "merge"
        delta = col.recolor(donors, targets)
        report.log(kind, donors, targets, delta, g)
        report.iterations += 1
        if report.iterations > k:
            report.violation("too-many-rounds", rounds=report.iterations, k=k)
    report.final_edges = col.edges
    return col.to_solution(), report
