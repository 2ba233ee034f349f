"""
Fractional conflict graphs and the feasibility predicates built on them.

A ConflictGraph holds a link universe, a sparse nonnegative weight function
W(e, f) (how much e's transmission degrades f) and the precedence order used
by the inductive algorithms. Sums of weights use math.fsum so every threshold
comparison is exact and independent of iteration order.
"""

import math
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from errors import CapExceededError, PreconditionError, UnknownLinkError
from link_graph import LinkId
from logging_config import get_logger
from schedule import Schedule
from settings import get_settings

logger = get_logger(__name__)

WeightMap = Mapping[Tuple[LinkId, LinkId], float]


class ConflictGraph:
    """
    Ordered links with a pairwise weight function W.

    The order is ascending ``order_key`` with link id tie-break, or the given
    explicit permutation. W(e, e) is always 0 and absent pairs weigh 0.
    A weight of 1 or more is saturating: the two links never share a slot.
    """

    def __init__(self, links: Iterable[LinkId], weights: Optional[WeightMap] = None,
                 order_key: Optional[Mapping[LinkId, float]] = None,
                 order: Optional[Sequence[LinkId]] = None):
        universe = list(dict.fromkeys(links))
        members = set(universe)
        if order is not None:
            if len(order) != len(universe) or set(order) != members:
                raise PreconditionError("explicit order must be a permutation of the link universe")
            ordered = list(order)
        else:
            key = order_key or {}
            ordered = sorted(universe, key=lambda lid: (key.get(lid, 0.0), lid))

        in_map: Dict[LinkId, Dict[LinkId, float]] = {lid: {} for lid in ordered}
        out_map: Dict[LinkId, Dict[LinkId, float]] = {lid: {} for lid in ordered}
        for (e, f), w in (weights or {}).items():
            if e not in members:
                raise UnknownLinkError(e, "conflict universe")
            if f not in members:
                raise UnknownLinkError(f, "conflict universe")
            w = float(w)
            if not w >= 0 or math.isinf(w):
                raise PreconditionError(f"weight W({e},{f}) = {w} is not a finite nonnegative number")
            if e == f:
                if w != 0:
                    raise PreconditionError(f"self weight W({e},{e}) must be 0")
                continue
            if w == 0:
                continue
            out_map[e][f] = w
            in_map[f][e] = w

        self._init_parts(ordered, in_map, out_map, dict(order_key or {}))

    def _init_parts(self, ordered, in_map, out_map, order_key):
        self._order: Tuple[LinkId, ...] = tuple(ordered)
        self._rank: Dict[LinkId, int] = {lid: i for i, lid in enumerate(ordered)}
        self._in = in_map
        self._out = out_map
        self._order_key = order_key

    @property
    def universe(self) -> Tuple[LinkId, ...]:
        """Links in precedence order."""
        return self._order

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, link_id: LinkId) -> bool:
        return link_id in self._rank

    def rank(self, link_id: LinkId) -> int:
        try:
            return self._rank[link_id]
        except KeyError:
            raise UnknownLinkError(link_id, "conflict universe") from None

    def precedes(self, e: LinkId, f: LinkId) -> bool:
        return self.rank(e) < self.rank(f)

    def weight(self, e: LinkId, f: LinkId) -> float:
        self.rank(e)
        self.rank(f)
        return self._out[e].get(f, 0.0)

    def in_weights(self, e: LinkId) -> Mapping[LinkId, float]:
        """{f: W(f, e)} for f with positive weight."""
        self.rank(e)
        return self._in[e]

    def out_weights(self, e: LinkId) -> Mapping[LinkId, float]:
        """{f: W(e, f)} for f with positive weight."""
        self.rank(e)
        return self._out[e]

    def weights(self) -> Dict[Tuple[LinkId, LinkId], float]:
        return {(e, f): w for e in self._order for f, w in self._out[e].items()}

    def order_key(self) -> Dict[LinkId, float]:
        return dict(self._order_key)

    @property
    def is_unweighted(self) -> bool:
        return all(w == 1.0 for e in self._order for w in self._out[e].values())

    @property
    def is_symmetric(self) -> bool:
        return all(self._out[f].get(e) == w for e in self._order for f, w in self._out[e].items())

    def neighbors(self, e: LinkId) -> Set[LinkId]:
        """Links joined to e by a positive weight in either direction."""
        return set(self.in_weights(e)) | set(self._out[e])

    def post_neighbors(self, e: LinkId) -> List[LinkId]:
        r = self.rank(e)
        return sorted((f for f in self.neighbors(e) if self._rank[f] > r), key=self._rank.__getitem__)

    def validate(self, links: Iterable[LinkId]) -> FrozenSet[LinkId]:
        ids = frozenset(links)
        for lid in ids:
            if lid not in self._rank:
                raise UnknownLinkError(lid, "conflict universe")
        return ids

    def restrict(self, links: Iterable[LinkId]) -> "ConflictGraph":
        """Induced conflict graph on ``links``, keeping the global order."""
        keep = self.validate(links)
        ordered = [lid for lid in self._order if lid in keep]
        in_map = {lid: {f: w for f, w in self._in[lid].items() if f in keep} for lid in ordered}
        out_map = {lid: {f: w for f, w in self._out[lid].items() if f in keep} for lid in ordered}
        restricted = ConflictGraph.__new__(ConflictGraph)
        restricted._init_parts(ordered, in_map, out_map,
                               {lid: k for lid, k in self._order_key.items() if lid in keep})
        return restricted

    def __repr__(self) -> str:
        edges = sum(len(m) for m in self._out.values())
        return f"ConflictGraph(links={len(self._order)}, weights={edges})"


def _in_terms(c: ConflictGraph, s, e) -> List[float]:
    incoming = c._in[e]
    if len(s) < len(incoming):
        return [incoming[f] for f in s if f != e and f in incoming]
    return [w for f, w in incoming.items() if f in s]


def _out_terms(c: ConflictGraph, e, s) -> List[float]:
    outgoing = c._out[e]
    if len(s) < len(outgoing):
        return [outgoing[f] for f in s if f != e and f in outgoing]
    return [w for f, w in outgoing.items() if f in s]


def w_in(c: ConflictGraph, s: Iterable[LinkId], e: LinkId) -> float:
    """W(s, e): total weight the links of s put on e."""
    s = c.validate(s)
    c.rank(e)
    return math.fsum(_in_terms(c, s, e))


def w_out(c: ConflictGraph, e: LinkId, s: Iterable[LinkId]) -> float:
    """W(e, s): total weight e puts on the links of s."""
    s = c.validate(s)
    c.rank(e)
    return math.fsum(_out_terms(c, e, s))


def directed_sums(c: ConflictGraph, s: Iterable[LinkId], e: LinkId) -> Tuple[float, float]:
    """
    Weight exchanged between e and the links of s that precede it.

    Returns:
        (sum of W(f, e), sum of W(e, f)) over f in s with f before e
    """
    s = c.validate(s)
    r = c.rank(e)
    earlier = {f for f in s if c._rank[f] < r}
    return math.fsum(_in_terms(c, earlier, e)), math.fsum(_out_terms(c, e, earlier))


def _saturated(c: ConflictGraph, s, e) -> bool:
    return any(w >= 1.0 for w in _in_terms(c, s, e))


def _member_ok(c: ConflictGraph, s, e) -> bool:
    terms = _in_terms(c, s, e)
    return all(w < 1.0 for w in terms) and math.fsum(terms) <= 1.0


def is_feasible(c: ConflictGraph, s: Iterable[LinkId]) -> bool:
    """
    True if every link of s has incoming weight at most 1 from the rest of s
    and no single link of s saturates it.
    """
    s = c.validate(s)
    return all(_member_ok(c, s, e) for e in s)


def can_join(c: ConflictGraph, slot: Set[LinkId], e: LinkId) -> bool:
    """Whether a feasible ``slot`` stays feasible after adding e."""
    if e in slot:
        return True
    grown = set(slot)
    grown.add(e)
    if not _member_ok(c, grown, e):
        return False
    return all(_member_ok(c, grown, f) for f in c._out[e] if f in slot)


def is_semi_feasible(c: ConflictGraph, s: Iterable[LinkId]) -> bool:
    """Every link exchanges at most 1/2 weight with the links before it in s."""
    s = c.validate(s)
    for e in s:
        r = c._rank[e]
        earlier = {f for f in s if c._rank[f] < r}
        if math.fsum(_in_terms(c, earlier, e) + _out_terms(c, e, earlier)) > 0.5:
            return False
    return True


def extract_feasible(c: ConflictGraph, s: Iterable[LinkId]) -> FrozenSet[LinkId]:
    """
    Keep the links of a semi-feasible set whose incoming weight is at most 1.

    At least half the links survive, and the result is feasible.
    """
    s = c.validate(s)
    if not is_semi_feasible(c, s):
        raise PreconditionError("extract_feasible needs a semi-feasible link set")
    kept = frozenset(e for e in s if math.fsum(_in_terms(c, s, e)) <= 1.0)
    logger.debug(f"Extracted {len(kept)} of {len(s)} links")
    return kept


def is_k_feasible(c: ConflictGraph, s: Iterable[LinkId], k: float) -> bool:
    """Every link of s puts at most 1/k total weight on the rest of s."""
    s = c.validate(s)
    return all(math.fsum(_out_terms(c, e, s)) <= 1.0 / k for e in s)


def is_dual_feasible(c: ConflictGraph, s: Iterable[LinkId]) -> bool:
    return is_k_feasible(c, s, 2)


def dual_served(c: ConflictGraph, s: Iterable[LinkId]) -> bool:
    """Each link is served forward (w_in <= 1) or in the reversed pass (w_out <= 1/2)."""
    s = c.validate(s)
    return all(_member_ok(c, s, e) or math.fsum(_out_terms(c, e, s)) <= 0.5 for e in s)


def greedy_color(c: ConflictGraph, s: Iterable[LinkId], reverse: bool = False,
                 algorithm: str = "greedy-color") -> Schedule:
    """
    First-fit coloring of s in precedence order (or reversed).

    Each link goes into the lowest slot that stays feasible with it; a new slot
    is opened when none does.
    """
    s = c.validate(s)
    ordered = sorted(s, key=c._rank.__getitem__, reverse=reverse)
    slots: List[Set[LinkId]] = []
    for e in ordered:
        for slot in slots:
            if can_join(c, slot, e):
                slot.add(e)
                break
        else:
            slots.append({e})
    return Schedule.from_slots(slots, algorithm)


def measure_rho(c: ConflictGraph, cap: Optional[int] = None) -> float:
    """
    Exact inductive independence of c.

    Maximum over links e and feasible sets I of links after e of
    W(I, e) + W(e, I). Links contributing nothing to e are skipped since
    dropping them keeps I feasible; the rest are searched by branch and bound.
    """
    cap = cap or get_settings().caps.rho_links
    if len(c) > cap:
        raise CapExceededError("rho_links", cap, len(c), "measure_rho is exhaustive; sample a sub-instance")

    best = 0.0
    for e in c.universe:
        r = c._rank[e]
        gains = {}
        for f in c.neighbors(e):
            if c._rank[f] > r:
                gains[f] = math.fsum([c._in[e].get(f, 0.0), c._out[e].get(f, 0.0)])
        candidates = sorted(gains, key=lambda f: (-gains[f], c._rank[f]))
        suffix = [0.0] * (len(candidates) + 1)
        for i in range(len(candidates) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + gains[candidates[i]]

        def search(index: int, chosen: Set[LinkId], value: float) -> None:
            nonlocal best
            if value > best:
                best = value
            if index == len(candidates) or value + suffix[index] <= best:
                return
            f = candidates[index]
            if can_join(c, chosen, f):
                chosen.add(f)
                search(index + 1, chosen, math.fsum(gains[g] for g in chosen))
                chosen.discard(f)
            search(index + 1, chosen, value)

        search(0, set(), 0.0)

    logger.debug(f"measure_rho over {len(c)} links: {best}")
    return best


def minimum_partition(items: Sequence, is_block: Callable[[List], bool]) -> Tuple[int, List[List]]:
    """
    Fewest blocks partitioning ``items``, for a downward-closed block predicate.

    Set-partition dynamic program over bitmasks (3^m time), so callers keep
    ``items`` small.

    Returns:
        (block count, blocks in discovery order)
    """
    m = len(items)
    if m == 0:
        return 0, []
    full = (1 << m) - 1
    block = [False] * (full + 1)
    block[0] = True
    for mask in range(1, full + 1):
        high = mask.bit_length() - 1
        rest = mask ^ (1 << high)
        if block[rest]:
            block[mask] = bool(is_block([items[i] for i in range(m) if mask >> i & 1]))

    inf = m + 1
    best = [inf] * (full + 1)
    choice = [0] * (full + 1)
    best[0] = 0
    for mask in range(1, full + 1):
        low = mask & -mask
        others = mask ^ low
        sub = others
        while True:
            candidate = sub | low
            if block[candidate] and best[mask ^ candidate] + 1 < best[mask]:
                best[mask] = best[mask ^ candidate] + 1
                choice[mask] = candidate
            if sub == 0:
                break
            sub = (sub - 1) & others

    blocks = []
    mask = full
    while mask:
        part = choice[mask]
        blocks.append([items[i] for i in range(m) if part >> i & 1])
        mask ^= part
    return best[full], blocks


def measure_eta(c: ConflictGraph, cap: Optional[int] = None) -> int:
    """
    Simplicial parameter of a 0/1 conflict graph: the largest minimum clique
    cover over the post-neighborhoods of all links.
    """
    if not c.is_unweighted:
        raise PreconditionError("measure_eta needs a 0/1 conflict graph")
    cap = cap or get_settings().caps.eta_neighborhood

    eta = 0
    for v in c.universe:
        post = c.post_neighbors(v)
        if len(post) > cap:
            raise CapExceededError("eta_neighborhood", cap, len(post),
                                   f"link {v} has {len(post)} post-neighbors")
        if not post:
            continue

        def is_clique(members: List[LinkId]) -> bool:
            newest = members[-1]
            adjacent = c.neighbors(newest)
            return all(f in adjacent for f in members[:-1])

        covers, _ = minimum_partition(post, is_clique)
        eta = max(eta, covers)
    return eta
