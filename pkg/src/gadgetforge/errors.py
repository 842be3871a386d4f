"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: :class:`InputError` -> 2,
:class:`ResourceLimitError` (and :class:`SolverTimeout`) -> 3.
"""

from __future__ import annotations


class GadgetForgeError(Exception):
    """Base class for all library errors."""


class InputError(GadgetForgeError, ValueError):
    """Malformed or out-of-contract input."""


class GraphFormatError(InputError):
    """A graph file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(InputError):
    """An operation was called on a solution that does not meet its precondition."""


class ResourceLimitError(GadgetForgeError):
    """Refused to materialize or enumerate something above a configured cap."""


class SolverTimeout(ResourceLimitError):
    """A solver ran out of its time budget before proving optimality."""


class ClaimViolation(GadgetForgeError, AssertionError):
    """A structural claim about a gadget coloring failed.

    Carries the gadget id and the local coloring so the configuration can be
    reproduced.
    """

    def __init__(self, message: str, gadget: int | None = None, coloring=None):
        self.gadget = gadget
        self.coloring = coloring
        super().__init__(message)


class RepairViolation(GadgetForgeError):
    """Raised in strict mode when a repair move would lose edges."""
