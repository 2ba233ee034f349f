"""
Square-grid scheduling of equal-length link classes, endpoint sparsity and
density measures, and the length-class MST scheduler built on them.
"""

import math
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from conflict_graph import ConflictGraph, _in_terms, is_feasible
from errors import GridScheduleError, PreconditionError
from link_graph import LinkGraph, LinkId, kruskal_mst, length_classes
from logging_config import get_logger
from schedule import Schedule
from settings import get_settings
from sinr_model import GeoLink, PowerScheme, SinrParams, geo_links, sinr_conflict_graph

logger = get_logger(__name__)


def _endpoints(links: Sequence[GeoLink]) -> np.ndarray:
    points = [p for link in links for p in (link.sender, link.receiver)]
    return np.array(points, dtype=float).reshape(-1, 2)


def max_square_count(points: np.ndarray, side: float) -> int:
    """
    Most points inside any closed axis-parallel square of the given side.

    Candidate squares have their lower-left corner at a point coordinate,
    optionally shifted by -side on either axis.
    """
    if len(points) == 0:
        return 0
    xs, ys = points[:, 0], points[:, 1]
    x_starts = np.unique(np.concatenate([xs, xs - side]))
    best = 0
    for x0 in x_starts:
        inside = (xs >= x0) & (xs <= x0 + side)
        if not inside.any():
            continue
        column = np.sort(ys[inside])
        y_starts = np.unique(np.concatenate([column, column - side]))
        counts = (np.searchsorted(column, y_starts + side, side="right")
                  - np.searchsorted(column, y_starts, side="left"))
        best = max(best, int(counts.max()))
    return best


def sparsity(links: Sequence[GeoLink], ell: float) -> int:
    """Largest number of endpoints any ell-square holds, for links no longer than ell."""
    too_long = [l.link_id for l in links if l.length > ell]
    if too_long:
        raise PreconditionError(f"sparsity at scale {ell} needs lengths <= {ell}; links {too_long[:5]} are longer")
    return max_square_count(_endpoints(links), ell)


def density(links: Sequence[GeoLink], ell: float) -> int:
    """Largest number of endpoints any ell-square holds, for links at least ell long."""
    too_short = [l.link_id for l in links if l.length < ell]
    if too_short:
        raise PreconditionError(f"density at scale {ell} needs lengths >= {ell}; links {too_short[:5]} are shorter")
    return max_square_count(_endpoints(links), ell)


def dense_slot_lower_bound(links: Sequence[GeoLink], params: SinrParams) -> int:
    """
    Slots any uniform-power schedule of ``links`` needs by density alone.

    With d endpoints in one square of side equal to the shortest length, at
    least ceil(d/2) links meet that square and pairwise block each other once
    beta >= sqrt(2)^alpha. Below that threshold only the trivial bound holds.
    """
    if not links:
        return 0
    ell = min(l.length for l in links)
    if params.beta < math.sqrt(2) ** params.alpha:
        return 1
    return math.ceil(density(links, ell) / 2)


def _grid_slots(links: Sequence[GeoLink], ell: float, colors: int) -> List[List[LinkId]]:
    cells: Dict[Tuple[int, int], List[LinkId]] = defaultdict(list)
    for link in sorted(links, key=lambda l: l.link_id):
        cell = (math.floor(link.sender[0] / ell), math.floor(link.sender[1] / ell))
        cells[cell].append(link.link_id)

    layers: Dict[Tuple[int, int], Dict[int, List[LinkId]]] = defaultdict(lambda: defaultdict(list))
    for (cx, cy), members in cells.items():
        color = (cx % colors, cy % colors)
        for layer, lid in enumerate(members):
            layers[color][layer].append(lid)

    slots = []
    for color in sorted(layers):
        for layer in sorted(layers[color]):
            slots.append(sorted(layers[color][layer]))
    return slots


def grid_schedule(links: Sequence[GeoLink], params: SinrParams, power: PowerScheme,
                  separation: Optional[float] = None, ell: Optional[float] = None,
                  conflict: Optional[ConflictGraph] = None,
                  max_retries: Optional[int] = None) -> Schedule:
    """
    Schedule a set of links whose lengths lie in [ell, 2*ell).

    Links are bucketed into ell-squares by sender. Squares get one of
    (ceil(c)+2)^2 periodic colors so equal-colored squares are more than c*ell
    apart, and each color class is split into layers holding at most one link
    per square. Every slot is verified; on failure c doubles and the grid is
    rebuilt.

    Args:
        links: Links of one length class
        params: SINR parameters for verification
        power: Power scheme for verification
        separation: Initial c (config default when None)
        ell: Class scale (shortest length when None)
        conflict: Conflict graph to verify against instead of the SINR graph
        max_retries: Number of doublings allowed (config default when None)

    Returns:
        Schedule whose slots all pass verification
    """
    config = get_settings().grid
    separation = config.separation if separation is None else separation
    max_retries = config.max_retries if max_retries is None else max_retries
    if not links:
        return Schedule.from_slots([], "grid", separation=separation)
    if ell is None:
        ell = min(l.length for l in links)
    outside = [l.link_id for l in links if not ell <= l.length < 2 * ell]
    if outside:
        raise PreconditionError(f"grid_schedule needs lengths in [{ell}, {2 * ell}); links {outside[:5]} are not")
    if conflict is None:
        conflict = sinr_conflict_graph(links, params, power)

    failure = None
    for attempt in range(max_retries + 1):
        colors = math.ceil(separation) + 2
        slots = _grid_slots(links, ell, colors)
        failure = None
        for slot in slots:
            if not is_feasible(conflict, slot):
                members = set(slot)
                worst = max(math.fsum(_in_terms(conflict, members, e)) for e in slot)
                failure = (slot, worst)
                break
        if failure is None:
            logger.debug(f"Grid schedule: {len(links)} links in {len(slots)} slots at c={separation:g}")
            return Schedule.from_slots(slots, "grid", separation=separation)
        logger.warning(f"Grid slot {failure[0]} infeasible (max sum {failure[1]:.4g}) at c={separation:g}, "
                       f"doubling separation (attempt {attempt + 1} of {max_retries + 1})")
        separation *= 2

    raise GridScheduleError(failure[0], failure[1], separation / 2)


def mst_length_class_schedule(g: LinkGraph, c: ConflictGraph, params: SinrParams,
                              power: PowerScheme, separation: Optional[float] = None) -> Schedule:
    """
    Schedule the MST one length class at a time.

    The MST of a geometric link graph is split into classes
    [min * 2^i, min * 2^(i+1)); each class is grid-scheduled and verified
    against ``c``, and the class schedules are concatenated.
    """
    tree = kruskal_mst(g)
    lengths = {lid: g.link(lid).length for lid in tree}
    classes = length_classes(lengths)
    shortest = min(lengths.values()) if lengths else 0.0

    by_class: Dict[int, List[LinkId]] = defaultdict(list)
    for lid, index in classes.items():
        by_class[index].append(lid)

    slots = []
    for index in sorted(by_class):
        members = geo_links(g, by_class[index])
        class_schedule = grid_schedule(members, params, power, separation=separation,
                                       ell=shortest * 2 ** index, conflict=c.restrict(by_class[index]))
        logger.debug(f"Length class {index}: {len(members)} links, {class_schedule.slot_count} slots")
        slots.extend(class_schedule.slots)

    return Schedule.from_slots(slots, "mst-length-class", classes=len(by_class))
