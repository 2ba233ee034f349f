"""
Instance generators: the wheel, random missing-links layouts, grid graphs,
link lattices and random weighted conflict instances.

Every random generator takes an explicit seed.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from conflict_graph import ConflictGraph
from errors import GenerationError, PreconditionError
from link_graph import LinkGraph, LinkId, NodeId, connected_components, make_graph
from logging_config import get_logger
from settings import get_settings
from sinr_model import GeoLink

logger = get_logger(__name__)

ORDINARY = "O"
TINY = "T"
YUGE = "Y"
CHAIN = "C"


@dataclass(frozen=True)
class WheelInstance:
    """A wheel link graph with its link labels and landmark nodes."""

    graph: LinkGraph
    labels: Dict[LinkId, str]
    k: int
    spoke_length: int
    hub: Tuple[NodeId, ...]
    rim: Tuple[NodeId, ...]
    positions: Tuple[Tuple[float, float], ...] = field(repr=False, default=())

    def links_labelled(self, label: str) -> frozenset:
        return frozenset(lid for lid, tag in self.labels.items() if tag == label)


def gen_wheel(k: int, attach_at_zero: bool = False, bounded_degree: bool = False) -> WheelInstance:
    """
    Hub, k spokes of K = 2k^2 nodes and a rim of long links.

    Spoke node v(i, j) sits at radius k + j and angle 2*pi*i/k. Ordinary links
    join the hub to v(i, 1) (v(i, 0) with ``attach_at_zero``), tiny links join
    consecutive spoke nodes and yuge links join the outer ends of neighbouring
    spokes. ``bounded_degree`` replaces the hub by a short path of k nodes,
    each carrying one ordinary link, so no node has degree above 3.

    Args:
        k: Number of spokes, at least 3
        attach_at_zero: Attach ordinary links at j = 0 instead of j = 1
        bounded_degree: Use the hub path variant

    Returns:
        WheelInstance with labels O (ordinary), T (tiny), Y (yuge), C (hub path)
    """
    if k < 3:
        raise PreconditionError(f"wheel needs k >= 3, got {k}")
    spoke = 2 * k * k
    hub_count = k if bounded_degree else 1
    attach = 0 if attach_at_zero else 1

    positions: List[Tuple[float, float]] = []
    if bounded_degree:
        step = 1.0 / (k - 1)
        positions.extend((-0.5 + i * step, 0.0) for i in range(k))
    else:
        positions.append((0.0, 0.0))
    for i in range(k):
        theta = 2 * math.pi * i / k
        for j in range(spoke):
            radius = k + j
            positions.append((radius * math.cos(theta), radius * math.sin(theta)))

    def node(i: int, j: int) -> int:
        return hub_count + i * spoke + j

    endpoints: List[Tuple[int, int]] = []
    lengths: List[Optional[float]] = []
    labels: List[str] = []

    for i in range(k):
        endpoints.append((i if bounded_degree else 0, node(i, attach)))
        lengths.append(None if bounded_degree else float(k + attach))
        labels.append(ORDINARY)
    for i in range(k):
        for j in range(spoke - 1):
            endpoints.append((node(i, j), node(i, j + 1)))
            lengths.append(1.0)
            labels.append(TINY)
    rim_radius = k + spoke - 1
    yuge_length = 2 * rim_radius * math.sin(math.pi / k)
    for i in range(k):
        endpoints.append((node(i, spoke - 1), node((i + 1) % k, spoke - 1)))
        lengths.append(yuge_length)
        labels.append(YUGE)
    if bounded_degree:
        for i in range(k - 1):
            endpoints.append((i, i + 1))
            lengths.append(1.0 / (k - 1))
            labels.append(CHAIN)

    graph = make_graph(len(positions), endpoints, lengths=lengths, positions=positions)
    label_map = dict(zip(graph.link_ids, labels))

    longest_ordinary = max(graph.link(lid).length for lid, tag in label_map.items() if tag == ORDINARY)
    if yuge_length <= longest_ordinary:
        raise GenerationError(f"yuge links ({yuge_length:g}) must be longer than ordinary links ({longest_ordinary:g})")

    rim = tuple(node(i, spoke - 1) for i in range(k))
    logger.info(f"Generated wheel k={k}: {graph.node_count} nodes, {graph.link_count} links")
    return WheelInstance(graph, label_map, k, spoke, tuple(range(hub_count)), rim, tuple(positions))


def wheel_steiner_terminals(wheel: WheelInstance) -> List[NodeId]:
    """Hub node plus the rim nodes incident on yuge links."""
    return [wheel.hub[0]] + list(wheel.rim)


def gen_random_missing_links(n: int, area: float, pi: float, p: float, seed: int,
                             max_attempts: Optional[int] = None) -> LinkGraph:
    """
    Random points in an area x area square with a random availability rule.

    Pairs within distance 1 are always available; pairs at distance in
    (1, pi] are kept with probability p. Layouts are re-drawn from the same
    seeded stream until the graph is connected.

    Raises:
        GenerationError: if no connected layout appears within max_attempts
    """
    if n < 1:
        raise PreconditionError(f"need at least one node, got {n}")
    if area <= 0 or pi < 1 or not 0 <= p <= 1:
        raise PreconditionError(f"invalid parameters area={area}, pi={pi}, p={p}")
    max_attempts = max_attempts or get_settings().random.max_attempts
    rng = np.random.default_rng(seed)

    for attempt in range(1, max_attempts + 1):
        points = rng.uniform(0.0, area, size=(n, 2))
        distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
        endpoints = []
        for u in range(n):
            for v in range(u + 1, n):
                d = distances[u, v]
                if d <= 1.0:
                    endpoints.append((u, v))
                elif d <= pi and rng.random() < p:
                    endpoints.append((u, v))
        positions = [(float(x), float(y)) for x, y in points]
        graph = make_graph(n, endpoints, positions=positions)
        if len(connected_components(graph)) == 1:
            logger.info(f"Random layout connected after {attempt} attempt(s): {len(endpoints)} links")
            return graph
        logger.warning(f"Random layout attempt {attempt} disconnected, redrawing")

    raise GenerationError(f"no connected layout for n={n}, area={area}, pi={pi}, p={p} "
                          f"after {max_attempts} attempts (seed {seed})")


def gen_grid_graph(rows: int, cols: int, spacing: float = 1.0) -> LinkGraph:
    """Connected lattice of nodes with links to right and lower neighbours."""
    if rows < 1 or cols < 1 or spacing <= 0:
        raise PreconditionError(f"invalid grid {rows}x{cols} spacing {spacing}")
    positions = [(c * spacing, r * spacing) for r in range(rows) for c in range(cols)]
    endpoints = []
    for r in range(rows):
        for c in range(cols):
            here = r * cols + c
            if c + 1 < cols:
                endpoints.append((here, here + 1))
            if r + 1 < rows:
                endpoints.append((here, here + cols))
    return make_graph(rows * cols, endpoints, lengths=[float(spacing)] * len(endpoints), positions=positions)


def gen_link_lattice(rows: int, cols: int, spacing: float, length: float = 1.0,
                     copies: int = 1) -> List[GeoLink]:
    """Isolated horizontal links with senders on a lattice, ``copies`` per site."""
    links = []
    for r in range(rows):
        for c in range(cols):
            sender = (c * spacing, r * spacing)
            for _ in range(copies):
                links.append(GeoLink(len(links), sender, (sender[0] + length, sender[1]), length))
    return links


def gen_random_weighted_instance(seed: int, nodes: int, links: int, density: float = 0.3,
                                 max_weight: float = 1.0, unit: bool = False,
                                 symmetric: bool = False) -> Tuple[LinkGraph, ConflictGraph]:
    """
    Connected random multigraph plus a sparse random conflict graph.

    A random spanning tree guarantees connectivity; the remaining links join
    random distinct node pairs. Lengths are drawn from [1, 4) and weights are
    rounded to three decimals, as if read from an instance file.

    Args:
        seed: Random seed
        nodes: Node count (at least 2)
        links: Link count (at least nodes - 1)
        density: Probability that an ordered pair carries weight
        max_weight: Upper bound for fractional weights
        unit: Use 0/1 weights
        symmetric: Mirror every weight
    """
    if nodes < 2 or links < nodes - 1:
        raise PreconditionError(f"need nodes >= 2 and links >= nodes - 1, got {nodes}, {links}")
    rng = np.random.default_rng(seed)
    endpoints = [(int(rng.integers(0, v)), v) for v in range(1, nodes)]
    while len(endpoints) < links:
        u, v = (int(x) for x in rng.choice(nodes, size=2, replace=False))
        endpoints.append((u, v))
    lengths = [round(float(x), 3) for x in rng.uniform(1.0, 4.0, size=len(endpoints))]
    graph = make_graph(nodes, endpoints, lengths=lengths)

    weights = {}
    ids = graph.link_ids
    for e in ids:
        for f in ids:
            if e == f or (symmetric and f < e):
                continue
            if rng.random() < density:
                w = 1.0 if unit else round(float(rng.uniform(0.0, max_weight)), 3)
                if w > 0:
                    weights[(e, f)] = w
                    if symmetric:
                        weights[(f, e)] = w
    return graph, ConflictGraph(ids, weights, order_key=graph.lengths())
