"""Repair procedures: turn any solution of a reduced instance into a gadget-complete one
without decreasing its induced edge count."""

from .coloring import Coloring, Move, RepairReport
from .cycle import repair_cycle
from .fence import (
    GadgetClaim,
    assert_fence_claim,
    enforce_property1,
    enforce_property2,
    fence_automorphisms,
    fence_claim,
    property1_holds,
    property2_holds,
    repair_fence,
)
from .torus import classify_tori, repair_torus

__all__ = [
    "Coloring",
    "Move",
    "RepairReport",
    "repair_cycle",
    "repair_fence",
    "repair_torus",
    "repair",
    "classify_tori",
    "GadgetClaim",
    "assert_fence_claim",
    "enforce_property1",
    "enforce_property2",
    "fence_automorphisms",
    "fence_claim",
    "property1_holds",
    "property2_holds",
]


def repair(g_star, trace, sol, *, level=None, strict=False):
    """Dispatch on the kind of the selected trace step."""
    steps = trace.steps
    idx = len(steps) - 1 if level is None else level
    kind = steps[idx].kind
    fn = {"torus": repair_torus, "fence": repair_fence, "cycle": repair_cycle}[kind]
    return fn(g_star, trace, sol, level=idx, strict=strict)
