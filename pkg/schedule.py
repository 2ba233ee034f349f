"""
Schedule: an ordered list of slots partitioning a tree's links.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Tuple

from link_graph import LinkId


@dataclass(frozen=True)
class Schedule:
    """
    Slots in emission order plus the tree they partition.

    ``reversed_copies`` marks dual schedules where every stored slot is run
    twice (forward and reversed direction); ``slot_count`` includes the copies.
    """

    slots: Tuple[FrozenSet[LinkId], ...]
    tree: FrozenSet[LinkId]
    algorithm: str = "greedy-color"
    reversed_copies: bool = False
    extra: Dict[str, float] = field(default_factory=dict, compare=False)

    @classmethod
    def from_slots(cls, slots: Iterable[Iterable[LinkId]], algorithm: str,
                   reversed_copies: bool = False, **extra) -> "Schedule":
        frozen = tuple(frozenset(slot) for slot in slots)
        tree = frozenset().union(*frozen) if frozen else frozenset()
        return cls(frozen, tree, algorithm, reversed_copies, dict(extra))

    @property
    def slot_count(self) -> int:
        return len(self.slots) * (2 if self.reversed_copies else 1)

    @property
    def slot_sizes(self) -> Tuple[int, ...]:
        return tuple(len(slot) for slot in self.slots)

    def expanded_slots(self) -> Tuple[FrozenSet[LinkId], ...]:
        """Slots as transmitted, with each dual slot repeated."""
        if not self.reversed_copies:
            return self.slots
        return tuple(slot for slot in self.slots for _ in range(2))

    def sorted_slots(self):
        return [sorted(slot) for slot in self.slots]
