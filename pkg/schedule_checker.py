"""
Independent re-check of a schedule against its link graph and conflict graph.

Nothing here trusts the solver: partition, tree shape and slot feasibility are
all recomputed from scratch.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

from conflict_graph import ConflictGraph, _in_terms, _out_terms
from link_graph import LinkGraph, NodeId, is_spanning_tree, spans_terminals
from logging_config import get_logger
from schedule import Schedule

logger = get_logger(__name__)


@dataclass
class ScheduleCheck:
    feasible: bool = True
    spanning: bool = True
    partition: bool = True
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.feasible and self.spanning and self.partition

    @property
    def first_violation(self) -> Optional[str]:
        return self.violations[0] if self.violations else None


def _slot_violation(c: ConflictGraph, slot, dual: bool) -> Optional[str]:
    for e in sorted(slot, key=c.rank):
        terms = _in_terms(c, slot, e)
        total = math.fsum(terms)
        if total <= 1.0 and all(w < 1.0 for w in terms):
            continue
        if dual and math.fsum(_out_terms(c, e, slot)) <= 0.5:
            continue
        if any(w >= 1.0 for w in terms):
            return f"link {e} is blocked by a saturating conflict (incoming weight {total:g})"
        return f"link {e} has incoming weight {total:g} > 1"
    return None


def check_schedule(schedule: Schedule, g: LinkGraph, c: ConflictGraph,
                   terminals: Optional[Iterable[NodeId]] = None,
                   require_tree: bool = True) -> ScheduleCheck:
    """
    Verify the three schedule invariants.

    Args:
        schedule: Schedule to check
        g: Link graph the tree must come from
        c: Conflict graph deciding slot feasibility
        terminals: When given, the tree only has to connect these nodes
        require_tree: Skip the tree-shape check (grid schedules of loose links)

    Returns:
        ScheduleCheck with one flag per invariant and readable violations
    """
    result = ScheduleCheck()

    seen = set()
    for index, slot in enumerate(schedule.slots):
        unknown = sorted(lid for lid in slot if lid not in g or lid not in c)
        if unknown:
            result.partition = False
            result.violations.append(f"slot {index}: unknown link {unknown[0]}")
        overlap = seen & slot
        if overlap:
            result.partition = False
            result.violations.append(f"slot {index}: link {min(overlap)} appears in an earlier slot")
        seen |= slot
    if seen != set(schedule.tree):
        result.partition = False
        missing = sorted(set(schedule.tree) - seen) or sorted(seen - set(schedule.tree))
        result.violations.append(f"slots and tree differ at link {missing[0]}")

    if require_tree:
        tree_links = sorted(lid for lid in seen if lid in g)
        if terminals is None:
            spanning = is_spanning_tree(g, tree_links)
        else:
            spanning = spans_terminals(g, tree_links, terminals)
        if not spanning:
            result.spanning = False
            result.violations.append("not spanning")

    for index, slot in enumerate(schedule.slots):
        known = frozenset(lid for lid in slot if lid in c)
        problem = _slot_violation(c, known, schedule.reversed_copies)
        if problem:
            result.feasible = False
            result.violations.append(f"slot {index}: {problem}")

    if not result.ok:
        logger.info(f"Schedule check failed: {result.first_violation}")
    return result
