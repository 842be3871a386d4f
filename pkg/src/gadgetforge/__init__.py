"""gadgetforge: executable degree-reducing reductions for Densest-k-Subgraph.

Clique -> max degree 5 (tori) -> max degree 4 (fence gadgets) -> max degree 3
(4-cycles), with exact solvers, solution repair and lifting.
"""

from .errors import (
    ClaimViolation,
    GadgetForgeError,
    GraphFormatError,
    InputError,
    PreconditionError,
    RepairViolation,
    ResourceLimitError,
    SolverTimeout,
)
from .graph import CliqueInstance, DksInstance, Graph, Solution, cut_edge_count, induced_edge_count, max_degree

__version__ = "0.1.0"
