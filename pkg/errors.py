"""
Exception hierarchy for conflict-forest.

Input faults also derive from ValueError so callers catching ValueError keep
working. The CLI maps these classes to exit codes.
"""

from typing import List, Optional, Sequence


class ConflictForestError(Exception):
    """Base class for every error raised by this project."""


class GraphConstructionError(ConflictForestError, ValueError):
    """Self-loop, endpoint out of range, or inconsistent geometry."""


class UnknownLinkError(ConflictForestError, KeyError):
    """A link id outside the graph or conflict-graph universe."""

    def __init__(self, link_id, where: str = "universe"):
        self.link_id = link_id
        super().__init__(f"unknown link id {link_id!r} (not in {where})")

    def __str__(self) -> str:
        return self.args[0]


class DisconnectedGraphError(ConflictForestError, ValueError):
    """Raised when an operation needs a connected link graph."""

    def __init__(self, components: Sequence[Sequence[int]], what: str = "graph"):
        self.components: List[List[int]] = [sorted(c) for c in components]
        first, second = self.components[0], self.components[1]
        super().__init__(
            f"{what} is disconnected: component {_preview(first)} and component {_preview(second)}"
        )


class PreconditionError(ConflictForestError, ValueError):
    """A documented precondition of an operation does not hold."""


class CapExceededError(ConflictForestError):
    """A desk-scale exhaustive computation was asked to go beyond its cap."""

    def __init__(self, cap_name: str, limit: int, actual: int, hint: Optional[str] = None):
        self.cap_name = cap_name
        self.limit = limit
        self.actual = actual
        message = (
            f"{cap_name} cap exceeded: {actual} > {limit}. "
            f"{hint or 'Sample a smaller instance'} or raise the cap with "
            f"CONFLICT_FOREST_CAPS={cap_name}=<n>"
        )
        super().__init__(message)


class SinrParameterError(ConflictForestError, ValueError):
    """SINR parameters or power scheme outside the supported range."""


class GridScheduleError(ConflictForestError):
    """The grid scheduler ran out of separation retries."""

    def __init__(self, slot: Sequence[int], max_sum: float, separation: float):
        self.slot = sorted(slot)
        self.max_sum = max_sum
        self.separation = separation
        super().__init__(
            f"grid schedule failed at separation {separation:g}: slot {self.slot} "
            f"has max affectance sum {max_sum:.6g}"
        )


class GenerationError(ConflictForestError, ValueError):
    """A random generator could not produce a valid instance."""


class InstanceFormatError(ConflictForestError, ValueError):
    """An instance or report file does not validate."""


class SchedulerInvariantError(ConflictForestError, RuntimeError):
    """An algorithm reached a state its guarantees rule out."""


def _preview(nodes: Sequence[int], limit: int = 8) -> str:
    if len(nodes) <= limit:
        return str(list(nodes))
    return "[" + ", ".join(str(n) for n in nodes[:limit]) + f", ... ({len(nodes)} nodes)]"
