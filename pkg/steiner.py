"""
Steiner connectivity scheduling through a multi-dimensional Steiner tree.

Each link f gets a 0/1 weight vector with one dimension per link e: the entry
is 1 when f is a post-neighbor of e. The ℓ∞ norm Z of a tree's summed vector
bounds a reverse-order greedy coloring of the tree by Z + 1 slots.
"""

import heapq
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from conflict_graph import ConflictGraph, greedy_color
from errors import DisconnectedGraphError, PreconditionError, SchedulerInvariantError
from link_graph import LinkGraph, LinkId, NodeId, connected_components, length_classes
from logging_config import get_logger
from schedule import Schedule
from settings import get_settings

logger = get_logger(__name__)

WeightVectors = Dict[LinkId, FrozenSet[LinkId]]


@dataclass(frozen=True)
class SteinerInstance:
    graph: LinkGraph
    terminals: Tuple[NodeId, ...]
    conflict: ConflictGraph

    def __post_init__(self):
        terminals = tuple(sorted(set(self.terminals)))
        object.__setattr__(self, "terminals", terminals)
        if len(terminals) < 2:
            raise PreconditionError("a Steiner instance needs at least two terminals")
        for t in terminals:
            if not 0 <= t < self.graph.node_count:
                raise PreconditionError(f"terminal {t} is not a node")
        missing = [lid for lid in self.graph.link_ids if lid not in self.conflict]
        if missing:
            raise PreconditionError(f"conflict graph does not cover links {missing[:5]}")
        if not self.conflict.is_unweighted or not self.conflict.is_symmetric:
            raise PreconditionError("Steiner scheduling needs a symmetric 0/1 conflict graph")


class LoadVector:
    """Per-dimension integer load, one dimension per link of the link graph."""

    def __init__(self, dims: Sequence[LinkId]):
        self.dims = tuple(dims)
        self._index = {lid: i for i, lid in enumerate(self.dims)}
        self.values = np.zeros(len(self.dims), dtype=np.int64)

    def add(self, vector: Iterable[LinkId]) -> None:
        for dim in vector:
            self.values[self._index[dim]] += 1

    def copy(self) -> "LoadVector":
        clone = LoadVector.__new__(LoadVector)
        clone.dims, clone._index, clone.values = self.dims, self._index, self.values.copy()
        return clone

    def __getitem__(self, dim: LinkId) -> int:
        return int(self.values[self._index[dim]])

    @property
    def norm(self) -> int:
        return int(self.values.max()) if len(self.values) else 0

    def argmax(self) -> Optional[LinkId]:
        if not len(self.values):
            return None
        return self.dims[int(np.argmax(self.values))]

    def as_dict(self) -> Dict[LinkId, int]:
        return {dim: int(v) for dim, v in zip(self.dims, self.values) if v}


@dataclass(frozen=True)
class SteinerTree:
    links: FrozenSet[LinkId]
    load: LoadVector = field(compare=False)

    @property
    def z(self) -> int:
        return self.load.norm


def mmst_weights(inst: SteinerInstance, same_length_class_only: bool = False) -> WeightVectors:
    """
    Sparse weight vectors: f has a 1 in dimension e iff e precedes f and they conflict.

    With ``same_length_class_only`` the entry also needs e and f in the same
    length class.
    """
    c = inst.conflict
    classes = length_classes(inst.graph.lengths()) if same_length_class_only else None
    links = set(inst.graph.link_ids)
    vectors = {}
    for f in inst.graph.link_ids:
        rank = c.rank(f)
        dims = [e for e in c.in_weights(f) if e in links and c.rank(e) < rank]
        if classes is not None:
            dims = [e for e in dims if classes[e] == classes[f]]
        vectors[f] = frozenset(dims)
    return vectors


def load_vector(inst: SteinerInstance, weights: WeightVectors, links: Iterable[LinkId]) -> LoadVector:
    load = LoadVector(inst.graph.link_ids)
    for f in links:
        load.add(weights[f])
    return load


def _require_terminals_connected(inst: SteinerInstance) -> None:
    components = connected_components(inst.graph)
    holding = [comp for comp in components if any(t in comp for t in inst.terminals)]
    if len(holding) > 1:
        raise DisconnectedGraphError(holding[:2], "terminal set")


def _cheapest_path(g: LinkGraph, component: Dict[NodeId, int], source: int,
                   potential: Dict[LinkId, float]):
    """Multi-source Dijkstra from one component to the nearest other component."""
    heap = [(0.0, 0, (), node) for node, comp in sorted(component.items()) if comp == source]
    heapq.heapify(heap)
    settled = set()
    while heap:
        cost, hops, path, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        owner = component.get(node)
        if owner is not None and owner != source:
            return cost, hops, path, owner
        for lid in g.incident(node):
            nxt = g.link(lid).other(node)
            if nxt in settled or component.get(nxt) == source:
                continue
            heapq.heappush(heap, (cost + potential[lid], hops + 1, path + (lid,), nxt))
    return None


def greedy_mmst(inst: SteinerInstance, weights: Optional[WeightVectors] = None,
                potential_base: Optional[float] = None) -> SteinerTree:
    """
    Join terminal components one path at a time, keeping the ℓ∞ load low.

    From each component the cheapest path to another component is found under
    the potential sum_e w_f[e] * base^load[e]; the path with the smallest
    resulting ℓ∞ load wins, ties going to lower potential, fewer hops, then
    link ids.
    """
    _require_terminals_connected(inst)
    weights = weights if weights is not None else mmst_weights(inst)
    base = potential_base or get_settings().steiner.potential_base
    g = inst.graph

    component: Dict[NodeId, int] = {t: i for i, t in enumerate(inst.terminals)}
    chosen: List[LinkId] = []
    load = LoadVector(g.link_ids)

    while len(set(component.values())) > 1:
        potential = {}
        for lid in g.link_ids:
            potential[lid] = sum(base ** load[e] for e in weights[lid])

        best = None
        for source in sorted(set(component.values())):
            found = _cheapest_path(g, component, source, potential)
            if found is None:
                continue
            cost, hops, path, target = found
            trial = load.copy()
            for lid in path:
                trial.add(weights[lid])
            key = (trial.norm, cost, hops, tuple(sorted(path)))
            if best is None or key < best[0]:
                best = (key, path, source, target, trial)

        if best is None:
            raise SchedulerInvariantError("no path joins the remaining terminal components")
        key, path, source, target, trial = best
        for lid in path:
            link = g.link(lid)
            component.setdefault(link.u, source)
            component.setdefault(link.v, source)
        for node, comp in component.items():
            if comp == target:
                component[node] = source
        chosen.extend(path)
        load = trial
        logger.debug(f"Steiner greedy added {len(path)} links, load now {load.norm}")

    return SteinerTree(frozenset(chosen), load)


def steiner_schedule(inst: SteinerInstance, by_length_class: bool = False) -> Schedule:
    """
    Steiner tree from greedy_mmst, colored greedily in reverse precedence order.

    With ``by_length_class`` the weights only count same-class conflicts and
    every length class is colored separately; class schedules are concatenated.
    """
    weights = mmst_weights(inst, same_length_class_only=by_length_class)
    tree = greedy_mmst(inst, weights)
    z = tree.z

    if not by_length_class:
        colored = greedy_color(inst.conflict, tree.links, reverse=True)
        if colored.slot_count > z + 1:
            raise SchedulerInvariantError(f"greedy coloring used {colored.slot_count} slots with load {z}")
        slots = colored.slots
    else:
        classes = length_classes({lid: inst.graph.link(lid).length for lid in tree.links})
        slots = []
        for index in sorted(set(classes.values())):
            members = [lid for lid in tree.links if classes[lid] == index]
            colored = greedy_color(inst.conflict.restrict(members), members, reverse=True)
            if colored.slot_count > z + 1:
                raise SchedulerInvariantError(
                    f"class {index} coloring used {colored.slot_count} slots with load {z}")
            slots.extend(colored.slots)

    algorithm = "steiner-length-class" if by_length_class else "steiner"
    schedule = Schedule.from_slots(slots, algorithm, load=z)
    logger.info(f"Steiner schedule: {len(tree.links)} links, load {z}, {schedule.slot_count} slots")
    return schedule


@dataclass(frozen=True)
class CliqueCertificate:
    link: LinkId
    post_neighbors: Tuple[LinkId, ...]
    clique: Tuple[LinkId, ...]


def clique_certificate(inst: SteinerInstance, tree: Iterable[LinkId],
                       weights: Optional[WeightVectors] = None) -> CliqueCertificate:
    """
    Lower-bound witness for scheduling ``tree``.

    Takes the dimension with the largest load, collects its post-neighbors in
    the tree and returns a maximum clique among them; any schedule of the tree
    needs at least that many slots.
    """
    tree = frozenset(tree)
    weights = weights if weights is not None else mmst_weights(inst)
    load = load_vector(inst, weights, tree)
    heaviest = load.argmax()
    if heaviest is None or load.norm == 0:
        return CliqueCertificate(heaviest if heaviest is not None else -1, (), ())

    post = sorted(f for f in tree if heaviest in weights[f])
    graph = nx.Graph()
    graph.add_nodes_from(post)
    for i, e in enumerate(post):
        for f in post[i + 1:]:
            if inst.conflict.weight(e, f) >= 1.0:
                graph.add_edge(e, f)
    clique = max((sorted(q) for q in nx.find_cliques(graph)), key=lambda q: (len(q), [-x for x in q]))
    return CliqueCertificate(heaviest, tuple(post), tuple(clique))
