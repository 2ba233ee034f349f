"""
Exhaustive ground truth for desk-scale instances: maximum feasible forest,
optimal tree schedule and optimal Steiner load.

All enumerations visit links in ascending id order and keep the first optimum
found, so results are deterministic. Feasible sets are downward closed, which
makes pruning on infeasible partial sets sound.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from conflict_graph import ConflictGraph, can_join, is_feasible, minimum_partition
from errors import CapExceededError
from link_graph import LinkGraph, LinkId, NodeId, UnionFind, require_connected
from logging_config import get_logger
from settings import get_settings
from steiner import SteinerInstance, WeightVectors, greedy_mmst, load_vector, mmst_weights

logger = get_logger(__name__)


@dataclass(frozen=True)
class OptimalSchedule:
    tree: FrozenSet[LinkId]
    chi: int
    slots: Tuple[FrozenSet[LinkId], ...]


@dataclass(frozen=True)
class OptimalSteiner:
    z: int
    tree: FrozenSet[LinkId]


def _check_cap(name: str, limit: int, actual: int) -> None:
    if actual > limit:
        raise CapExceededError(name, limit, actual, "Exhaustive oracles only handle desk-scale instances; sample a sub-instance")


def _merged(labels: Tuple[int, ...], a: int, b: int) -> Tuple[int, ...]:
    old, new = max(a, b), min(a, b)
    return tuple(new if x == old else x for x in labels)


def max_feasible_forest(g: LinkGraph, c: ConflictGraph, cap: Optional[int] = None) -> FrozenSet[LinkId]:
    """
    Largest acyclic feasible link set; lexicographically least among the largest.

    Include-first search in ascending id order reaches equal-size sets in
    lexicographic order, so only strict improvements replace the incumbent.
    """
    cap = cap or get_settings().caps.forest_links
    _check_cap("forest_links", cap, g.link_count)
    ids = sorted(g.link_ids)
    limit = max(g.node_count - 1, 0)
    best: List[LinkId] = []

    def search(index: int, chosen: List[LinkId], labels: Tuple[int, ...]) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        room = min(len(ids) - index, limit - len(chosen))
        if index == len(ids) or len(chosen) + room <= len(best):
            return
        lid = ids[index]
        link = g.link(lid)
        a, b = labels[link.u], labels[link.v]
        if a != b and can_join(c, set(chosen), lid):
            chosen.append(lid)
            search(index + 1, chosen, _merged(labels, a, b))
            chosen.pop()
        search(index + 1, chosen, labels)

    search(0, [], tuple(range(g.node_count)))
    logger.debug(f"Maximum feasible forest has {len(best)} links")
    return frozenset(best)


def spanning_trees(g: LinkGraph) -> Iterator[Tuple[LinkId, ...]]:
    """All spanning trees by include/exclude recursion with connectivity pruning."""
    ids = sorted(g.link_ids)
    need = max(g.node_count - 1, 0)

    def still_connected(chosen: List[LinkId], start: int) -> bool:
        uf = UnionFind(g.node_count)
        for lid in chosen + ids[start:]:
            link = g.link(lid)
            uf.union(link.u, link.v)
        return len({uf.find(x) for x in range(g.node_count)}) <= 1

    def rec(index: int, chosen: List[LinkId], labels: Tuple[int, ...]):
        if len(chosen) == need:
            yield tuple(chosen)
            return
        if len(chosen) + len(ids) - index < need:
            return
        lid = ids[index]
        link = g.link(lid)
        a, b = labels[link.u], labels[link.v]
        if a != b:
            chosen.append(lid)
            yield from rec(index + 1, chosen, _merged(labels, a, b))
            chosen.pop()
        if still_connected(chosen, index + 1):
            yield from rec(index + 1, chosen, labels)

    yield from rec(0, [], tuple(range(g.node_count)))


def min_feasible_partition(c: ConflictGraph, links, cache: Optional[Dict] = None) -> Tuple[int, List[List[LinkId]]]:
    """Fewest feasible slots covering ``links`` (set-partition dynamic program)."""
    cache = {} if cache is None else cache

    def feasible(members: List[LinkId]) -> bool:
        key = frozenset(members)
        if key not in cache:
            cache[key] = is_feasible(c, key)
        return cache[key]

    return minimum_partition(sorted(links), feasible)


def opt_tree_schedule(g: LinkGraph, c: ConflictGraph) -> OptimalSchedule:
    """Spanning tree with the fewest feasible slots, over all spanning trees."""
    caps = get_settings().caps
    _check_cap("schedule_nodes", caps.schedule_nodes, g.node_count)
    _check_cap("schedule_links", caps.schedule_links, g.link_count)
    require_connected(g)

    cache: Dict = {}
    best: Optional[OptimalSchedule] = None
    trees = 0
    for tree in spanning_trees(g):
        trees += 1
        chi, slots = min_feasible_partition(c, tree, cache)
        if best is None or chi < best.chi:
            best = OptimalSchedule(frozenset(tree), chi, tuple(frozenset(s) for s in slots))
            if chi <= 1:
                break
    if best is None:
        best = OptimalSchedule(frozenset(), 0, ())
    logger.debug(f"Optimal tree schedule: {best.chi} slots after {trees} trees")
    return best


def opt_steiner_tree(inst: SteinerInstance, weights: Optional[WeightVectors] = None) -> OptimalSteiner:
    """Steiner tree of least ℓ∞ load, by enumerating acyclic link sets."""
    caps = get_settings().caps
    g = inst.graph
    _check_cap("steiner_nodes", caps.steiner_nodes, g.node_count)
    _check_cap("steiner_links", caps.steiner_links, g.link_count)
    weights = weights if weights is not None else mmst_weights(inst)

    greedy = greedy_mmst(inst, weights)
    best_z, best_tree = greedy.z, greedy.links
    ids = sorted(g.link_ids)
    terminals = inst.terminals

    def search(index: int, chosen: List[LinkId], labels: Tuple[int, ...]) -> None:
        nonlocal best_z, best_tree
        z = load_vector(inst, weights, chosen).norm
        if z >= best_z:
            return
        if len({labels[t] for t in terminals}) == 1:
            best_z, best_tree = z, frozenset(chosen)
            return
        if index == len(ids):
            return
        lid = ids[index]
        link = g.link(lid)
        a, b = labels[link.u], labels[link.v]
        if a != b:
            chosen.append(lid)
            search(index + 1, chosen, _merged(labels, a, b))
            chosen.pop()
        search(index + 1, chosen, labels)

    if best_z > 0:
        search(0, [], tuple(range(g.node_count)))
    return OptimalSteiner(best_z, best_tree)


def opt_steiner_load(inst: SteinerInstance) -> int:
    """Minimum ℓ∞ load Z* over all Steiner trees."""
    return opt_steiner_tree(inst).z
