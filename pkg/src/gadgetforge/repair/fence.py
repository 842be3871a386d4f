"""Canonicalization of solutions on fence-reduced graphs.

Local vertex ``i`` of gadget ``g`` is global vertex ``8 * g + i``; locals
0..5 are the outer vertices v1..v6 (each with at most one edge leaving the
gadget), 6 and 7 are the inner vertices v7, v8.

Two local normal forms are established first, both by swaps inside a
gadget that keep its black count:

* property 1: no white inner vertex has at most one white outer neighbor and
  no white inner neighbor;
* property 2: in every gadget with at most four white vertices the white
  vertices induce a connected subgraph.

Under these, every partially black gadget admits cheap donor sets (see
:func:`fence_claim`), which drive the completion loop in :func:`repair_fence`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cache

from ..errors import ClaimViolation, GadgetForgeError
from ..graph import Graph, Solution
from ..reductions import FENCE_EDGES, FENCE_INNER, FENCE_OUTER, ReductionStep, ReductionTrace
from .coloring import Coloring, RepairReport, select_step, start

__all__ = [
    "LOCAL_ADJ",
    "fence_automorphisms",
    "property1_holds",
    "property2_holds",
    "enforce_property1",
    "enforce_property2",
    "GadgetClaim",
    "fence_claim",
    "assert_fence_claim",
    "repair_fence",
]

SIZE = 8
LOCAL_ADJ: tuple[tuple[int, ...], ...] = tuple(
    tuple(sorted({b for a, b in FENCE_EDGES if a == v} | {a for a, b in FENCE_EDGES if b == v})) for v in range(SIZE)
)
_INNER = set(FENCE_INNER)

# Disconnected four-white configurations left once properties 1 holds and no
# white vertex is isolated, with the swap that reconnects them:
# (white set, vertex to blacken, vertex to whiten), up to automorphism.
_FOUR_WHITE_FIXES = (
    (frozenset({0, 1, 3, 4}), 0, 2),
    (frozenset({1, 2, 4, 5}), 1, 3),
)


@cache
def fence_automorphisms() -> tuple[tuple[int, ...], ...]:
    edges = {frozenset(e) for e in FENCE_EDGES}
    return tuple(
        p
        for p in itertools.permutations(range(SIZE))
        if all(frozenset((p[a], p[b])) in edges for a, b in FENCE_EDGES)
    )


# ---------------------------------------------------------------- local views

def _white(col: Coloring, base: int) -> list[int]:
    return [i for i in range(SIZE) if not col.color[base + i]]


def _connected(vertices: set[int]) -> bool:
    if not vertices:
        return True
    todo = [next(iter(vertices))]
    seen = set(todo)
    while todo:
        v = todo.pop()
        for u in LOCAL_ADJ[v]:
            if u in vertices and u not in seen:
                seen.add(u)
                todo.append(u)
    return seen == vertices


def _p1_offender(white: set[int]) -> int | None:
    for v in FENCE_INNER:
        if v not in white:
            continue
        outer_white = sum(1 for u in LOCAL_ADJ[v] if u not in _INNER and u in white)
        inner_white = any(u in white for u in LOCAL_ADJ[v] if u in _INNER)
        if outer_white <= 1 and not inner_white:
            return v
    return None


def _p2_violated(white: set[int]) -> bool:
    return 2 <= len(white) <= 4 and not _connected(white)


def property1_holds(col: Coloring, base: int) -> bool:
    return _p1_offender(set(_white(col, base))) is None


def property2_holds(col: Coloring, base: int) -> bool:
    return not _p2_violated(set(_white(col, base)))


def _swap_delta(col: Coloring, w: int, b: int) -> int:
    """Edge change of blackening white ``w`` and whitening black ``b`` (global ids)."""
    return col.bdeg[w] - (1 if b in col.g.neighbor_sets[w] else 0) - col.bdeg[b]


def _swap(col: Coloring, report: RepairReport | None, kind: str, gadget: int, w: int, b: int) -> int:
    delta = col.recolor([b], [w])
    if report is not None:
        report.log(kind, [b], [w], delta, gadget)
        if delta < 0:
            report.violation(f"{kind}-lost-edges", gadget=gadget, to_black=w, to_white=b, delta=delta)
    return delta


# ---------------------------------------------------------------- property 1

def _fix_property1(col: Coloring, gadget: int, report: RepairReport | None) -> None:
    base = gadget * SIZE
    while (v := _p1_offender(set(_white(col, base)))) is not None:
        outer = [u for u in LOCAL_ADJ[v] if u not in _INNER]
        black_outer = [u for u in outer if col.color[base + u]]
        if len(black_outer) == len(outer):
            candidates = black_outer
        else:
            # one white outer neighbour: some black outer neighbour has black-degree <= 2
            candidates = [u for u in black_outer if col.bdeg[base + u] <= 2]
            if not candidates:
                if report is not None:
                    report.violation("property1-missing-witness", gadget=gadget, inner=v)
                candidates = black_outer
        w = min(candidates, key=lambda u: (col.bdeg[base + u], u))
        _swap(col, report, "property1", gadget, base + v, base + w)


def enforce_property1(
    g_star: Graph, trace: ReductionTrace, coloring: Coloring, *, level: int | None = None,
    report: RepairReport | None = None,
) -> Coloring:
    """Return a copy of ``coloring`` in which property 1 holds in every fence gadget."""
    step = select_step(trace, level, "fence")
    col = coloring.copy()
    for g in range(step.base_n):
        _fix_property1(col, g, report)
    return col


# ---------------------------------------------------------------- property 2

def _fix_property2(col: Coloring, gadget: int, report: RepairReport | None) -> None:
    base = gadget * SIZE
    for _ in range(2 * SIZE):
        white = set(_white(col, base))
        if not _p2_violated(white):
            return
        singletons = [w for w in sorted(white) if not any(u in white for u in LOCAL_ADJ[w])]
        if singletons:
            options = []
            for w in singletons:
                rest = white - {w}
                for b in range(SIZE):
                    if b in white or not any(u in rest for u in LOCAL_ADJ[b]):
                        continue
                    after = (white - {w}) | {b}
                    keeps_p1 = _p1_offender(after) is None
                    options.append(((keeps_p1, _swap_delta(col, base + w, base + b), -w, -b), w, b))
            _, w, b = max(options)
            _swap(col, report, "property2", gadget, base + w, base + b)
            continue
        fix = _four_white_fix(white)
        if fix is None:
            if report is not None:
                report.violation("property2-unexpected-configuration", gadget=gadget, white=sorted(white))
            options = [
                ((_swap_delta(col, base + w, base + b), -w, -b), w, b)
                for w in sorted(white)
                for b in range(SIZE)
                if b not in white and _connected((white - {w}) | {b})
            ]
            if not options:
                return
            _, w, b = max(options)
            fix = (w, b)
        _swap(col, report, "property2", gadget, base + fix[0], base + fix[1])
    if report is not None:
        report.violation("property2-no-fixpoint", gadget=gadget, white=_white(col, base))


def _four_white_fix(white: set[int]) -> tuple[int, int] | None:
    for config, to_black, to_white in _FOUR_WHITE_FIXES:
        for p in fence_automorphisms():
            if {p[x] for x in config} == white:
                return p[to_black], p[to_white]
    return None


def enforce_property2(
    g_star: Graph, trace: ReductionTrace, coloring: Coloring, *, level: int | None = None,
    report: RepairReport | None = None,
) -> Coloring:
    """Return a copy of ``coloring`` in which property 2 holds in every fence gadget.

    Swaps are chosen to keep property 1 intact; that it still holds afterwards
    is checked and reported, not assumed.
    """
    step = select_step(trace, level, "fence")
    col = coloring.copy()
    for g in range(step.base_n):
        had_p1 = property1_holds(col, g * SIZE)
        _fix_property2(col, g, report)
        if had_p1 and not property1_holds(col, g * SIZE) and report is not None:
            report.violation("property2-broke-property1", gadget=g, white=_white(col, g * SIZE))
    return col


def _normalize(col: Coloring, step: ReductionStep, report: RepairReport) -> None:
    for g in range(step.base_n):
        base = g * SIZE
        for _ in range(4 * SIZE):
            _fix_property1(col, g, report)
            _fix_property2(col, g, report)
            if property1_holds(col, base) and property2_holds(col, base):
                break
        else:
            report.violation("properties-no-fixpoint", gadget=g, white=_white(col, base))


# ---------------------------------------------------------------- the claim

@dataclass
class GadgetClaim:
    """Evidence for the four parts of the claim in one gadget.

    ``part1`` is ``(required, actual)`` non-black internal edges, ``part2``
    maps ``j`` to the witnessing black set, ``part3`` is
    ``(internal non-black edges, black edges incident with the black set)``
    and ``part4`` the black vertex of black-degree at most two.  Parts that do
    not apply are ``None`` (or absent from ``part2``).
    """

    gadget: int
    white: int
    part1: tuple[int, int] | None = None
    part2: dict[int, tuple[int, ...]] = field(default_factory=dict)
    part3: tuple[int, int] | None = None
    part4: int | None = None
    failures: list[str] = field(default_factory=list)


def _internal_black_edges(col: Coloring, base: int) -> int:
    return sum(1 for a, b in FENCE_EDGES if col.color[base + a] and col.color[base + b])


def _part2_witness(col: Coloring, base: int, j: int) -> tuple[int, ...] | None:
    black = [base + i for i in range(SIZE) if col.color[base + i]]
    for subset in itertools.combinations(black, j):
        if col.incident_black_edges(subset) <= 2 * j + 1:
            return subset
    return None


def _part4_witness(col: Coloring, base: int) -> int | None:
    return next((base + i for i in range(SIZE) if col.color[base + i] and col.bdeg[base + i] <= 2), None)


def fence_claim(col: Coloring, gadget: int) -> GadgetClaim:
    base = gadget * SIZE
    n_white = len(_white(col, base))
    n_black = SIZE - n_white
    rec = GadgetClaim(gadget, n_white)
    nonblack = len(FENCE_EDGES) - _internal_black_edges(col, base)
    if n_white in (1, 2, 3):
        rec.part1 = (2 * n_white + 1, nonblack)
        if nonblack < 2 * n_white + 1:
            rec.failures.append(f"part1: {nonblack} non-black edges with {n_white} white")
    for j in (1, 2, 3):
        if n_black >= j and n_white >= j:
            wit = _part2_witness(col, base, j)
            if wit is None:
                rec.failures.append(f"part2: no {j} black vertices with <= {2 * j + 1} black edges")
            else:
                rec.part2[j] = wit
    if n_white == 4:
        black = [base + i for i in range(SIZE) if col.color[base + i]]
        rec.part3 = (nonblack, col.incident_black_edges(black))
        if nonblack < 8 or rec.part3[1] > 8:
            rec.failures.append(f"part3: {rec.part3[0]} non-black internal, {rec.part3[1]} incident black")
    if 1 <= n_black <= 3:
        rec.part4 = _part4_witness(col, base)
        if rec.part4 is None:
            rec.failures.append("part4: every black vertex has black-degree above two")
    return rec


def assert_fence_claim(
    g_star: Graph, trace: ReductionTrace, coloring: Coloring, *, level: int | None = None
) -> list[GadgetClaim]:
    """Check parts 1-4 of the claim in every gadget; raise :class:`ClaimViolation` on the first failure."""
    step = select_step(trace, level, "fence")
    records = []
    for g in range(step.base_n):
        base = g * SIZE
        if not (property1_holds(coloring, base) and property2_holds(coloring, base)):
            raise ClaimViolation(f"gadget {g} does not satisfy properties 1 and 2", g, _white(coloring, base))
        rec = fence_claim(coloring, g)
        if rec.failures:
            raise ClaimViolation(f"gadget {g}: " + "; ".join(rec.failures), g, _white(coloring, base))
        records.append(rec)
    return records


# ---------------------------------------------------------------- completion

def _part4_sequence(col: Coloring, step: ReductionStep, skip: int, count: int) -> list[int] | None:
    """Whiten ``count`` vertices one by one, each of black-degree <= 2 in a gadget with 1-3 black."""
    work = col.copy()
    picked = []
    for _ in range(count):
        choice = None
        for h in range(step.base_n):
            if h == skip:
                continue
            base = h * SIZE
            if 1 <= sum(work.color[base:base + SIZE]) <= 3:
                choice = _part4_witness(work, base)
                if choice is not None:
                    break
        if choice is None:
            return None
        work.recolor([choice], [])
        picked.append(choice)
    return picked


def _greedy_sequence(col: Coloring, step: ReductionStep, skip: int, count: int) -> list[int] | None:
    work = col.copy()
    counts = work.gadget_counts(step)
    picked = []
    for _ in range(count):
        pool = [
            v for h in range(step.base_n) if h != skip and 0 < counts[h] < SIZE
            for v in range(h * SIZE, (h + 1) * SIZE) if work.color[v]
        ]
        if not pool:
            return None
        v = min(pool, key=lambda x: (work.bdeg[x], x))
        work.recolor([v], [])
        counts[v // SIZE] -= 1
        picked.append(v)
    return picked


def _planned_donors(col: Coloring, step: ReductionStep, gi: int, i: int, counts: list[int]) -> tuple[str, list[int] | None]:
    """The donor set the case analysis prescribes for completing gadget ``gi`` with ``i`` white vertices."""
    others = [h for h in range(step.base_n) if h != gi and 0 < counts[h] < SIZE]
    if i == 1:
        for h in others:
            wit = _part2_witness(col, h * SIZE, 1)
            if wit is not None:
                return "part2", list(wit)
        return "part2", None
    if i == 2:
        singles = [h for h in others if counts[h] == 1]
        if len(singles) >= 2:
            return "singletons", [v for h in singles[:2] for v in range(h * SIZE, (h + 1) * SIZE) if col.color[v]]
        for h in others:
            if counts[h] >= 2 and SIZE - counts[h] >= 2:
                wit = _part2_witness(col, h * SIZE, 2)
                return "part2", list(wit) if wit else None
        return "part2", None
    if i == 3:
        for h in others:
            if counts[h] >= 3 and SIZE - counts[h] >= 3:
                wit = _part2_witness(col, h * SIZE, 3)
                return "part2", list(wit) if wit else None
        return "part4", _part4_sequence(col, step, gi, 3)
    if i == 4:
        for h in others:
            if counts[h] == 4:
                return "part3", [v for v in range(h * SIZE, (h + 1) * SIZE) if col.color[v]]
        return "part4", _part4_sequence(col, step, gi, 4)
    return "part4", _part4_sequence(col, step, gi, i)


def _alternatives(col: Coloring, step: ReductionStep, gi: int, i: int, counts: list[int]):
    others = [h for h in range(step.base_n) if h != gi and 0 < counts[h] < SIZE]
    if i <= 3:
        for h in others:
            if counts[h] >= i and SIZE - counts[h] >= i:
                wit = _part2_witness(col, h * SIZE, i)
                if wit is not None:
                    yield "part2", list(wit)
    singles = [h for h in others if counts[h] == 1]
    if i == 2 and len(singles) >= 2:
        for a, b in itertools.combinations(singles, 2):
            yield "singletons", [v for h in (a, b) for v in range(h * SIZE, (h + 1) * SIZE) if col.color[v]]
    for h in others:
        if counts[h] == i:
            yield "empty", [v for v in range(h * SIZE, (h + 1) * SIZE) if col.color[v]]
    seq = _part4_sequence(col, step, gi, i)
    if seq is not None:
        yield "part4", seq
    seq = _greedy_sequence(col, step, gi, i)
    if seq is not None:
        yield "greedy", seq


def _evaluate(col: Coloring, donors: list[int], targets: list[int]) -> int:
    return col.copy().recolor(donors, targets)


def repair_fence(
    g_star: Graph, trace: ReductionTrace, sol: Solution, *, level: int | None = None, strict: bool = False
) -> tuple[Solution, RepairReport]:
    """Make every fence gadget fully black or fully white without losing edges.

    Each round normalizes all gadgets (properties 1 and 2), picks the lowest
    numbered gadget with the fewest white vertices and completes it using the
    donor set its case prescribes.  A round never touches a fully black
    gadget, so at most ``k`` rounds are needed.
    """
    step = select_step(trace, level, "fence")
    col, report = start(g_star, step, sol, strict)
    k = step.param
    while True:
        _normalize(col, step, report)
        counts = col.gadget_counts(step)
        incomplete = [g for g, c in enumerate(counts) if 0 < c < SIZE]
        if not incomplete:
            break
        if len(incomplete) == 1:
            raise GadgetForgeError(f"internal: gadget {incomplete[0]} is the only incomplete gadget")
        for g in incomplete:
            rec = fence_claim(col, g)
            if rec.failures:
                report.violation("claim", gadget=g, failures=rec.failures, white=_white(col, g * SIZE))
        i = min(SIZE - counts[g] for g in incomplete)
        gi = next(g for g in incomplete if SIZE - counts[g] == i)
        targets = [gi * SIZE + x for x in _white(col, gi * SIZE)]

        case, donors = _planned_donors(col, step, gi, i, counts)
        delta = _evaluate(col, donors, targets) if donors is not None else None
        if donors is None:
            report.violation("missing-donor", gadget=gi, white=i, case=case)
        elif delta < 0:
            report.violation("completion-lost-edges", gadget=gi, white=i, case=case, delta=delta)
        if donors is None or delta < 0:
            scored = [(_evaluate(col, d, targets), c, d) for c, d in _alternatives(col, step, gi, i, counts)]
            if not scored:
                raise GadgetForgeError(f"internal: no donors available to complete gadget {gi}")
            best = max(s[0] for s in scored)
            delta, case, donors = next(s for s in scored if s[0] == best)
        applied = col.recolor(donors, targets)
        assert applied == delta
        report.log(f"complete-{case}", donors, targets, applied, gi)
        report.iterations += 1
        if report.iterations > k:
            report.violation("too-many-rounds", rounds=report.iterations, k=k)
    report.final_edges = col.edges
    return col.to_solution(), report
