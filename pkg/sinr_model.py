"""
Geometric conflict models.

SINR affectance under fixed monotone power schemes, plus the graph-based
models (L², line graph, disk and protocol). Links are treated as directed from
sender to receiver; for link-graph links the sender sits at ``u``.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from conflict_graph import ConflictGraph
from errors import PreconditionError, SinrParameterError
from link_graph import LENGTH_TOLERANCE, LinkGraph, LinkId, Point, euclidean
from logging_config import get_logger

logger = get_logger(__name__)


class PowerKind(Enum):
    UNIFORM = "uniform"
    LENGTH_EXPONENT = "length-exponent"


@dataclass(frozen=True)
class GeoLink:
    """
    Directed link from sender to receiver.

    ``stored_length`` is the length recorded on the link graph; when given it
    must agree with the coordinate distance to LENGTH_TOLERANCE and is used in
    place of that distance, so equal-length links compare equal exactly.
    """

    link_id: LinkId
    sender: Point
    receiver: Point
    stored_length: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        distance = euclidean(self.sender, self.receiver)
        if self.stored_length is not None:
            if abs(self.stored_length - distance) > LENGTH_TOLERANCE * max(distance, self.stored_length):
                raise PreconditionError(
                    f"link {self.link_id} length {self.stored_length!r} disagrees with distance {distance!r}")
        if self.length <= 0:
            raise PreconditionError(f"link {self.link_id} has zero length")

    @property
    def length(self) -> float:
        if self.stored_length is not None:
            return self.stored_length
        return euclidean(self.sender, self.receiver)


@dataclass(frozen=True)
class SinrParams:
    """Path-loss exponent alpha, SINR threshold beta and ambient noise."""

    alpha: float = 3.0
    beta: float = 1.0
    noise: float = 0.0

    def __post_init__(self):
        if not 1 < self.alpha <= 6:
            raise SinrParameterError(f"alpha must be in (1, 6], got {self.alpha}")
        if self.beta < 1:
            raise SinrParameterError(f"beta must be at least 1, got {self.beta}")
        if self.noise < 0:
            raise SinrParameterError(f"noise must be nonnegative, got {self.noise}")


@dataclass(frozen=True)
class PowerScheme:
    """
    Oblivious power: P = length^(tau * alpha).

    tau = 0 is uniform power, tau = 1 linear power, tau = 1/2 mean power.
    """

    kind: PowerKind = PowerKind.UNIFORM
    tau: float = 0.0

    def __post_init__(self):
        if self.kind is PowerKind.UNIFORM and self.tau != 0.0:
            raise SinrParameterError("uniform power has no tau")
        if not 0.0 <= self.tau <= 1.0:
            raise SinrParameterError(f"tau must be in [0, 1], got {self.tau}")

    @classmethod
    def uniform(cls) -> "PowerScheme":
        return cls(PowerKind.UNIFORM, 0.0)

    @classmethod
    def length_exponent(cls, tau: float) -> "PowerScheme":
        return cls(PowerKind.LENGTH_EXPONENT, float(tau))

    @classmethod
    def linear(cls) -> "PowerScheme":
        return cls(PowerKind.LENGTH_EXPONENT, 1.0)

    def power(self, length: float, alpha: float) -> float:
        if self.kind is PowerKind.UNIFORM:
            return 1.0
        return length ** (self.tau * alpha)

    def check_monotone(self, lengths: Iterable[float], alpha: float) -> bool:
        """
        Power never decreases and received signal never increases with length.

        Raises SinrParameterError naming the offending pair otherwise.
        """
        ordered = sorted(lengths)
        for shorter, longer in zip(ordered, ordered[1:]):
            p_short, p_long = self.power(shorter, alpha), self.power(longer, alpha)
            if p_long < p_short * (1 - 1e-12):
                raise SinrParameterError(f"power decreases from length {shorter} to {longer}")
            if p_long / longer ** alpha > p_short / shorter ** alpha * (1 + 1e-12):
                raise SinrParameterError(f"received signal increases from length {shorter} to {longer}")
        return True


def signal_strength(v: GeoLink, params: SinrParams, power: PowerScheme) -> float:
    return power.power(v.length, params.alpha) / v.length ** params.alpha


def noise_factor(v: GeoLink, params: SinrParams, power: PowerScheme) -> float:
    """c_v = beta / (1 - beta * N / signal); raises if v fails even alone."""
    signal = signal_strength(v, params, power)
    if params.beta * params.noise >= signal:
        raise SinrParameterError(
            f"link {v.link_id} cannot succeed alone: beta*N = {params.beta * params.noise:g} "
            f">= signal {signal:g}"
        )
    return params.beta / (1 - params.beta * params.noise / signal)


def affectance(w: GeoLink, v: GeoLink, params: SinrParams, power: PowerScheme) -> float:
    """
    Interference of w on v relative to v's signal, clipped at 1.

    Args:
        w: Interfering link
        v: Affected link
        params: SINR parameters
        power: Power scheme shared by both links

    Returns:
        a_w(v) in [0, 1]; 0 when w is v, 1 when w's sender sits on v's receiver
    """
    c_v = noise_factor(v, params, power)
    if w.link_id == v.link_id:
        return 0.0
    d_wv = euclidean(w.sender, v.receiver)
    if d_wv == 0:
        return 1.0
    alpha = params.alpha
    raw = c_v * (power.power(w.length, alpha) / power.power(v.length, alpha)) * (v.length / d_wv) ** alpha
    return min(1.0, raw)


def affectance_matrix(links: Sequence[GeoLink], params: SinrParams, power: PowerScheme,
                      clip: bool = True) -> np.ndarray:
    """A[i, j] = affectance of links[i] on links[j]; zero diagonal."""
    n = len(links)
    if n == 0:
        return np.zeros((0, 0))
    senders = np.array([l.sender for l in links], dtype=float)
    receivers = np.array([l.receiver for l in links], dtype=float)
    lengths = np.array([l.length for l in links], dtype=float)
    powers = np.array([power.power(d, params.alpha) for d in lengths])
    factors = np.array([noise_factor(l, params, power) for l in links])

    # distances[i, j] = |sender_i - receiver_j|
    distances = np.linalg.norm(senders[:, None, :] - receivers[None, :, :], axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (lengths[None, :] / distances) ** params.alpha
        raw = factors[None, :] * (powers[:, None] / powers[None, :]) * ratio
    raw = np.where(distances == 0, 1.0, raw)
    if clip:
        raw = np.minimum(raw, 1.0)
    np.fill_diagonal(raw, 0.0)
    return raw


def sinr_conflict_graph(links: Sequence[GeoLink], params: SinrParams, power: PowerScheme,
                        availability: Optional[LinkGraph] = None) -> ConflictGraph:
    """
    Affectance conflict graph ordered by length.

    With ``availability`` (the link graph the links belong to), interference
    only travels along available pairs: W(e, f) is kept only when e's sender
    node is f's receiver node or the two nodes are joined by a link.
    """
    matrix = affectance_matrix(links, params, power)
    ids = [l.link_id for l in links]

    allowed = None
    if availability is not None:
        adjacent: Set[Tuple[int, int]] = set()
        for link in availability.links:
            adjacent.add((link.u, link.v))
            adjacent.add((link.v, link.u))
        sender_node = {lid: availability.link(lid).u for lid in ids}
        receiver_node = {lid: availability.link(lid).v for lid in ids}

        def allowed(e, f):
            a, b = sender_node[e], receiver_node[f]
            return a == b or (a, b) in adjacent

    weights = {}
    rows, cols = np.nonzero(matrix)
    for i, j in zip(rows.tolist(), cols.tolist()):
        if allowed is not None and not allowed(ids[i], ids[j]):
            continue
        weights[(ids[i], ids[j])] = float(matrix[i, j])
    order_key = {l.link_id: l.length for l in links}
    logger.debug(f"SINR conflict graph: {len(links)} links, {len(weights)} positive weights")
    return ConflictGraph(ids, weights, order_key=order_key)


def sinr_value(v: GeoLink, active: Iterable[GeoLink], params: SinrParams, power: PowerScheme) -> float:
    """Signal over noise plus interference at v's receiver, from the formula directly."""
    alpha = params.alpha
    signal = power.power(v.length, alpha) / v.length ** alpha
    interference = []
    for u in active:
        if u.link_id == v.link_id:
            continue
        d = euclidean(u.sender, v.receiver)
        if d == 0:
            return 0.0
        interference.append(power.power(u.length, alpha) / d ** alpha)
    denominator = params.noise + math.fsum(interference)
    if denominator == 0:
        return math.inf
    return signal / denominator


def sinr_successful(active: Sequence[GeoLink], params: SinrParams, power: PowerScheme) -> bool:
    return all(sinr_value(v, active, params, power) >= params.beta for v in active)


def geo_links(g: LinkGraph, link_ids: Optional[Iterable[LinkId]] = None) -> List[GeoLink]:
    """GeoLinks for the (selected) links of a geometric link graph."""
    ids = g.link_ids if link_ids is None else sorted(link_ids)
    result = []
    for lid in ids:
        link = g.link(lid)
        if not link.has_geometry:
            raise PreconditionError(f"link {lid} has no geometry")
        result.append(GeoLink(lid, link.sender, link.receiver, link.length))
    return result


def _order_key(g: LinkGraph) -> Optional[Dict[LinkId, float]]:
    return g.lengths() if g.has_lengths else None


def l2_conflict_graph(g: LinkGraph) -> ConflictGraph:
    """Links conflict when they share a node or some link joins their endpoints."""
    near: List[Set[int]] = [{x} for x in range(g.node_count)]
    for link in g.links:
        near[link.u].add(link.v)
        near[link.v].add(link.u)

    weights = {}
    for link in g.links:
        reach = near[link.u] | near[link.v]
        for node in reach:
            for other in g.incident(node):
                if other != link.link_id:
                    weights[(link.link_id, other)] = 1.0
    return ConflictGraph(g.link_ids, weights, order_key=_order_key(g))


def line_graph_conflicts(g: LinkGraph) -> ConflictGraph:
    """Links conflict when they share a node."""
    weights = {}
    for link in g.links:
        for node in link.endpoints:
            for other in g.incident(node):
                if other != link.link_id:
                    weights[(link.link_id, other)] = 1.0
    return ConflictGraph(g.link_ids, weights, order_key=_order_key(g))


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    span = dx * dx + dy * dy
    if span == 0:
        return euclidean(p, a)
    t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / span))
    return euclidean(p, (ax + t * dx, ay + t * dy))


def _orientation(p: Point, q: Point, r: Point) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def segment_distance(a: Point, b: Point, c: Point, d: Point) -> float:
    """Euclidean distance between segments ab and cd (0 if they cross)."""
    o1, o2 = _orientation(a, b, c), _orientation(a, b, d)
    o3, o4 = _orientation(c, d, a), _orientation(c, d, b)
    if ((o1 > 0 > o2) or (o1 < 0 < o2)) and ((o3 > 0 > o4) or (o3 < 0 < o4)):
        return 0.0
    return min(_point_segment_distance(a, c, d), _point_segment_distance(b, c, d),
               _point_segment_distance(c, a, b), _point_segment_distance(d, a, b))


def _distance_conflicts(links: Sequence[GeoLink], limit) -> ConflictGraph:
    weights = {}
    for i, e in enumerate(links):
        for f in links[i + 1:]:
            longer, shorter = max(e.length, f.length), min(e.length, f.length)
            if segment_distance(e.sender, e.receiver, f.sender, f.receiver) < limit(longer, shorter):
                weights[(e.link_id, f.link_id)] = 1.0
                weights[(f.link_id, e.link_id)] = 1.0
    return ConflictGraph([l.link_id for l in links], weights,
                         order_key={l.link_id: l.length for l in links})


def disk_conflict_graph(links: Sequence[GeoLink], k: float) -> ConflictGraph:
    """Conflict when the links are closer than k times the longer length."""
    if k < 0:
        raise PreconditionError(f"disk radius factor must be nonnegative, got {k}")
    return _distance_conflicts(links, lambda longer, shorter: k * longer)


def protocol_conflict_graph(links: Sequence[GeoLink], k1: float, k2: float) -> ConflictGraph:
    """Conflict when closer than k1 * longer + k2 * shorter."""
    if k1 < 0 or k2 < 0:
        raise PreconditionError("protocol factors must be nonnegative")
    return _distance_conflicts(links, lambda longer, shorter: k1 * longer + k2 * shorter)
