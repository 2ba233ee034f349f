"""
Spanning-tree schedulers: CapKruskal, its dual variant, Conn and the MST
greedy baseline.
"""

import math
from dataclasses import dataclass
from typing import FrozenSet, Optional

from conflict_graph import ConflictGraph, _in_terms, _out_terms, greedy_color
from errors import PreconditionError, SchedulerInvariantError
from link_graph import LinkGraph, LinkId, UnionFind, contract, kruskal_mst, require_connected
from logging_config import get_logger
from schedule import Schedule

logger = get_logger(__name__)

FORWARD_THRESHOLD = 0.5
DUAL_THRESHOLD = 0.25


@dataclass(frozen=True)
class CapKruskalTrace:
    accepted: FrozenSet[LinkId]   # S: semi-feasible forest from the greedy pass
    kept: FrozenSet[LinkId]       # S': links surviving extraction


def cap_kruskal_trace(g: LinkGraph, c: ConflictGraph, threshold: Optional[float] = None,
                      dual: bool = False) -> CapKruskalTrace:
    """
    Run CapKruskal and return both the accepted set and the extracted output.

    Links are scanned in the conflict order. A link is accepted when its weight
    exchange with the accepted links is within ``threshold`` and it joins two
    components. The output keeps accepted links with incoming weight at most 1
    (dual: or outgoing weight at most 1/2).
    """
    if threshold is None:
        threshold = DUAL_THRESHOLD if dual else FORWARD_THRESHOLD
    missing = [lid for lid in g.link_ids if lid not in c]
    if missing:
        raise PreconditionError(f"conflict graph does not cover links {missing[:5]}")

    uf = UnionFind(g.node_count)
    accepted = set()
    for lid in sorted(g.link_ids, key=c.rank):
        link = g.link(lid)
        if uf.connected(link.u, link.v):
            continue
        exchange = math.fsum(_in_terms(c, accepted, lid) + _out_terms(c, lid, accepted))
        if exchange <= threshold:
            accepted.add(lid)
            uf.union(link.u, link.v)

    kept = set()
    for lid in accepted:
        incoming = _in_terms(c, accepted, lid)
        if math.fsum(incoming) <= 1.0 and all(w < 1.0 for w in incoming):
            kept.add(lid)
        elif dual and math.fsum(_out_terms(c, lid, accepted)) <= 0.5:
            kept.add(lid)
    return CapKruskalTrace(frozenset(accepted), frozenset(kept))


def cap_kruskal(g: LinkGraph, c: ConflictGraph, threshold: Optional[float] = None,
                dual: bool = False) -> FrozenSet[LinkId]:
    """Feasible forest from one CapKruskal pass (see cap_kruskal_trace)."""
    return cap_kruskal_trace(g, c, threshold, dual).kept


def conn(g: LinkGraph, c: ConflictGraph, dual: bool = False) -> Schedule:
    """
    Build a spanning tree slot by slot.

    Each round runs CapKruskal on the contracted graph, records the result as
    a slot and contracts it. Link ids survive contraction, so slots are
    already in original ids.
    """
    require_connected(g)
    current = g
    slots = []
    while current.link_count:
        restricted = c.restrict(current.link_ids)
        slot = cap_kruskal(current, restricted, dual=dual)
        if not slot:
            raise SchedulerInvariantError(
                f"Conn round {len(slots)} produced an empty slot on {current.link_count} links"
            )
        slots.append(slot)
        current, _ = contract(current, slot)
        logger.debug(f"Conn round {len(slots)}: slot of {len(slot)} links, "
                     f"{current.node_count} nodes and {current.link_count} links remain")

    schedule = Schedule.from_slots(slots, "conn-dual" if dual else "conn", reversed_copies=dual)
    logger.info(f"Conn finished with {schedule.slot_count} slots on {g.node_count} nodes")
    return schedule


def mst_greedy(g: LinkGraph, c: ConflictGraph) -> Schedule:
    """Baseline: minimum spanning tree by length, colored greedily."""
    tree = kruskal_mst(g)
    schedule = greedy_color(c, tree, algorithm="mst-greedy")
    logger.info(f"MST greedy used {schedule.slot_count} slots")
    return schedule
