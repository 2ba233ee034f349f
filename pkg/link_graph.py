"""
Link graphs: a multigraph of nodes and links (parallel links allowed, no loops),
optionally carrying sender/receiver geometry and per-link lengths.

Also holds union-find, contraction and Kruskal's MST, which every scheduler
builds on.
"""

import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from errors import DisconnectedGraphError, GraphConstructionError, PreconditionError, UnknownLinkError
from logging_config import get_logger

logger = get_logger(__name__)

NodeId = int
LinkId = int
Point = Tuple[float, float]

# Relative tolerance between a stored length and the sender-receiver distance.
LENGTH_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Link:
    """One available communication link between nodes ``u`` and ``v``."""

    link_id: LinkId
    u: NodeId
    v: NodeId
    length: Optional[float] = None
    sender: Optional[Point] = None
    receiver: Optional[Point] = None

    @property
    def endpoints(self) -> Tuple[NodeId, NodeId]:
        return (self.u, self.v)

    @property
    def has_geometry(self) -> bool:
        return self.sender is not None and self.receiver is not None

    def other(self, node: NodeId) -> NodeId:
        return self.v if node == self.u else self.u


class LinkGraph:
    """
    Immutable multigraph over dense node ids ``0..node_count-1``.

    Link ids are arbitrary distinct integers so that contraction can keep the
    id of every surviving link. Use ``make_graph`` to build one from raw input.
    """

    def __init__(self, node_count: int, links: Iterable[Link]):
        self._node_count = node_count
        self._links: Dict[LinkId, Link] = {}
        self._incident: List[List[LinkId]] = [[] for _ in range(node_count)]
        for link in sorted(links, key=lambda l: l.link_id):
            if link.link_id in self._links:
                raise GraphConstructionError(f"duplicate link id {link.link_id}")
            if link.u == link.v:
                raise GraphConstructionError(f"link {link.link_id} is a self-loop at node {link.u}")
            for node in link.endpoints:
                if not 0 <= node < node_count:
                    raise GraphConstructionError(
                        f"link {link.link_id} endpoint {node} out of range 0..{node_count - 1}"
                    )
            self._links[link.link_id] = link
            self._incident[link.u].append(link.link_id)
            self._incident[link.v].append(link.link_id)

    @property
    def node_count(self) -> int:
        return self._node_count

    @property
    def link_count(self) -> int:
        return len(self._links)

    @property
    def links(self) -> Tuple[Link, ...]:
        return tuple(self._links.values())

    @property
    def link_ids(self) -> Tuple[LinkId, ...]:
        return tuple(self._links)

    @property
    def has_lengths(self) -> bool:
        return all(link.length is not None for link in self._links.values())

    @property
    def has_geometry(self) -> bool:
        return bool(self._links) and all(link.has_geometry for link in self._links.values())

    def __contains__(self, link_id: LinkId) -> bool:
        return link_id in self._links

    def link(self, link_id: LinkId) -> Link:
        try:
            return self._links[link_id]
        except KeyError:
            raise UnknownLinkError(link_id, "link graph") from None

    def incident(self, node: NodeId) -> Tuple[LinkId, ...]:
        return tuple(self._incident[node])

    def lengths(self) -> Dict[LinkId, float]:
        """Map of link id to length; raises if any link has none."""
        if not self.has_lengths:
            raise PreconditionError("link graph has links without a length")
        return {lid: link.length for lid, link in self._links.items()}

    def validate_links(self, link_ids: Iterable[LinkId]) -> FrozenSet[LinkId]:
        ids = frozenset(link_ids)
        for lid in ids:
            if lid not in self._links:
                raise UnknownLinkError(lid, "link graph")
        return ids

    def to_networkx(self):
        """Export as a networkx MultiGraph keyed by link id."""
        import networkx as nx

        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self._node_count))
        for link in self._links.values():
            graph.add_edge(link.u, link.v, key=link.link_id, length=link.length)
        return graph

    def __repr__(self) -> str:
        return f"LinkGraph(nodes={self._node_count}, links={len(self._links)})"


class UnionFind:
    """Disjoint sets over ``0..size-1`` with path compression and union by rank."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of x and y. Returns False if they were already joined."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True

    def groups(self) -> List[List[int]]:
        """Sets as sorted lists, ordered by their smallest member."""
        by_root: Dict[int, List[int]] = {}
        for x in range(len(self.parent)):
            by_root.setdefault(self.find(x), []).append(x)
        return sorted(by_root.values(), key=lambda members: members[0])


def euclidean(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def make_graph(node_count: int,
               endpoints: Sequence[Tuple[NodeId, NodeId]],
               lengths: Optional[Sequence[Optional[float]]] = None,
               geometry: Optional[Sequence[Optional[Tuple[Point, Point]]]] = None,
               positions: Optional[Sequence[Optional[Point]]] = None,
               link_ids: Optional[Sequence[LinkId]] = None) -> LinkGraph:
    """
    Build a LinkGraph from endpoint pairs.

    Links are indexed in input order unless ``link_ids`` is given. Geometry can
    be supplied per link (sender, receiver) or per node through ``positions``,
    in which case the sender is at ``u`` and the receiver at ``v``. A link with
    geometry but no explicit length gets its Euclidean length.

    Args:
        node_count: Number of nodes
        endpoints: (u, v) per link
        lengths: Optional explicit length per link
        geometry: Optional (sender, receiver) per link
        positions: Optional coordinates per node
        link_ids: Optional explicit link ids

    Returns:
        The constructed LinkGraph

    Raises:
        GraphConstructionError: on loops, out-of-range endpoints or a length
            disagreeing with the geometry
    """
    if node_count < 0:
        raise GraphConstructionError(f"node count must be nonnegative, got {node_count}")
    count = len(endpoints)
    for name, seq in (("lengths", lengths), ("geometry", geometry), ("link_ids", link_ids)):
        if seq is not None and len(seq) != count:
            raise GraphConstructionError(f"{name} has {len(seq)} entries for {count} links")
    if positions is not None and len(positions) != node_count:
        raise GraphConstructionError(f"positions has {len(positions)} entries for {node_count} nodes")

    links = []
    for index, (u, v) in enumerate(endpoints):
        lid = link_ids[index] if link_ids is not None else index
        sender = receiver = None
        if geometry is not None and geometry[index] is not None:
            sender, receiver = geometry[index]
        elif positions is not None and 0 <= u < node_count and 0 <= v < node_count:
            if positions[u] is not None and positions[v] is not None:
                sender, receiver = positions[u], positions[v]
        if sender is not None:
            sender = (float(sender[0]), float(sender[1]))
            receiver = (float(receiver[0]), float(receiver[1]))

        length = lengths[index] if lengths is not None else None
        if length is not None:
            length = float(length)
            if length < 0 or math.isnan(length):
                raise GraphConstructionError(f"link {lid} has invalid length {length}")
        if sender is not None:
            distance = euclidean(sender, receiver)
            if length is None:
                length = distance
            elif abs(length - distance) > LENGTH_TOLERANCE * max(distance, length):
                raise GraphConstructionError(
                    f"link {lid} length {length!r} disagrees with geometry distance {distance!r}"
                )
        links.append(Link(lid, int(u), int(v), length, sender, receiver))

    return LinkGraph(node_count, links)


def connected_components(g: LinkGraph, links: Optional[Iterable[LinkId]] = None) -> List[List[NodeId]]:
    """Node components of g, or of the subgraph formed by ``links``."""
    uf = UnionFind(g.node_count)
    for lid in (g.link_ids if links is None else links):
        link = g.link(lid)
        uf.union(link.u, link.v)
    return uf.groups()


def require_connected(g: LinkGraph) -> None:
    components = connected_components(g)
    if len(components) > 1:
        raise DisconnectedGraphError(components)


def contract(g: LinkGraph, s: Iterable[LinkId]) -> Tuple[LinkGraph, Dict[NodeId, NodeId]]:
    """
    Merge the endpoints of every link in ``s``.

    Links that become loops are discarded, every other link keeps its id. New
    node ids are dense and follow the smallest old node of each merged group.

    Returns:
        (contracted graph, mapping old node -> new node)
    """
    s = g.validate_links(s)
    uf = UnionFind(g.node_count)
    for lid in s:
        link = g.link(lid)
        uf.union(link.u, link.v)

    mapping: Dict[NodeId, NodeId] = {}
    for new_id, members in enumerate(uf.groups()):
        for node in members:
            mapping[node] = new_id

    survivors = []
    for link in g.links:
        u, v = mapping[link.u], mapping[link.v]
        if u == v:
            continue
        survivors.append(Link(link.link_id, u, v, link.length, link.sender, link.receiver))

    contracted = LinkGraph(len(set(mapping.values())), survivors)
    logger.debug(f"Contracted {len(s)} links: {g.node_count} -> {contracted.node_count} nodes, "
                 f"{g.link_count} -> {contracted.link_count} links")
    return contracted, mapping


def kruskal_mst(g: LinkGraph, key: Optional[Mapping[LinkId, float]] = None) -> FrozenSet[LinkId]:
    """
    Minimum-key spanning tree, ties broken by ascending link id.

    Args:
        g: Connected link graph
        key: Per-link key; defaults to the stored lengths

    Returns:
        Link ids of the spanning tree
    """
    if key is None:
        key = g.lengths()
    missing = [lid for lid in g.link_ids if lid not in key]
    if missing:
        raise PreconditionError(f"kruskal key missing for links {missing[:5]}")

    uf = UnionFind(g.node_count)
    tree = []
    for lid in sorted(g.link_ids, key=lambda lid: (key[lid], lid)):
        link = g.link(lid)
        if uf.union(link.u, link.v):
            tree.append(lid)

    if len(tree) != max(g.node_count - 1, 0):
        raise DisconnectedGraphError(uf.groups())
    return frozenset(tree)


def is_forest(g: LinkGraph, links: Iterable[LinkId]) -> bool:
    uf = UnionFind(g.node_count)
    for lid in links:
        link = g.link(lid)
        if not uf.union(link.u, link.v):
            return False
    return True


def is_spanning_tree(g: LinkGraph, links: Iterable[LinkId]) -> bool:
    links = list(links)
    return len(links) == max(g.node_count - 1, 0) and len(set(links)) == len(links) and is_forest(g, links)


def spans_terminals(g: LinkGraph, links: Iterable[LinkId], terminals: Iterable[NodeId]) -> bool:
    """True if ``links`` is a forest in which all terminals share one tree."""
    links = list(links)
    if len(set(links)) != len(links) or not is_forest(g, links):
        return False
    uf = UnionFind(g.node_count)
    for lid in links:
        link = g.link(lid)
        uf.union(link.u, link.v)
    roots = {uf.find(t) for t in terminals}
    return len(roots) <= 1


def length_classes(lengths: Mapping[LinkId, float]) -> Dict[LinkId, int]:
    """
    Class index floor(log2(len / min_len)) per link, anchored at the shortest link.

    Class i holds lengths in [min * 2^i, min * 2^(i+1)).
    """
    if not lengths:
        return {}
    shortest = min(lengths.values())
    if shortest <= 0:
        raise PreconditionError("length classes need strictly positive lengths")
    classes = {}
    for lid, length in lengths.items():
        index = int(math.floor(math.log2(length / shortest)))
        # guard float rounding right at a power of two
        while shortest * 2 ** (index + 1) <= length:
            index += 1
        while index > 0 and shortest * 2 ** index > length:
            index -= 1
        classes[lid] = index
    return classes
