"""
Versioned JSON formats for instances and reports, and conversion between the
files and in-memory problems.

Serialization is canonical (sorted keys, shortest round-trip floats) so reruns
produce byte-identical files.
"""

import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from conflict_graph import ConflictGraph
from errors import InstanceFormatError
from link_graph import LinkGraph, make_graph
from logging_config import get_logger
from schedule import Schedule
from schedule_checker import ScheduleCheck
from sinr_model import (PowerScheme, SinrParams, disk_conflict_graph, geo_links, l2_conflict_graph,
                        line_graph_conflicts, protocol_conflict_graph, sinr_conflict_graph)

logger = get_logger(__name__)

FORMAT_VERSION = 1
ConflictModel = Literal["explicit", "sinr", "l2", "disk", "protocol", "line"]


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid")


class NodeRecord(_Record):
    id: int
    x: Optional[float] = None
    y: Optional[float] = None


class LinkRecord(_Record):
    id: int
    u: int
    v: int
    sx: Optional[float] = None
    sy: Optional[float] = None
    rx: Optional[float] = None
    ry: Optional[float] = None
    length: Optional[float] = None


class WeightRecord(_Record):
    e: int
    f: int
    w: float

    @field_validator("w", mode="before")
    @classmethod
    def parse_decimal(cls, value):
        if isinstance(value, str):
            try:
                return float(Decimal(value))
            except InvalidOperation:
                raise ValueError(f"weight {value!r} is not a decimal number")
        return value

    @field_validator("w")
    @classmethod
    def nonnegative(cls, value: float) -> float:
        if not value >= 0:
            raise ValueError(f"weight must be nonnegative, got {value}")
        return value


class PowerRecord(_Record):
    kind: Literal["uniform", "length-exponent"] = "uniform"
    tau: Optional[float] = None


class ConflictParams(_Record):
    alpha: Optional[float] = None
    beta: Optional[float] = None
    noise: Optional[float] = None
    power: Optional[PowerRecord] = None
    K: Optional[float] = None
    K1: Optional[float] = None
    K2: Optional[float] = None
    missing_links: Optional[bool] = None


class ConflictSpec(_Record):
    model: ConflictModel
    weights: Optional[List[WeightRecord]] = None
    params: Optional[ConflictParams] = None


class InstanceFile(_Record):
    format: Literal[1] = FORMAT_VERSION
    nodes: List[NodeRecord]
    links: List[LinkRecord]
    terminals: Optional[List[int]] = None
    conflict: ConflictSpec
    order: Literal["length", "explicit"] = "length"
    permutation: Optional[List[int]] = None

    @model_validator(mode="after")
    def check_references(self) -> "InstanceFile":
        node_ids = [n.id for n in self.nodes]
        if sorted(node_ids) != list(range(len(node_ids))):
            raise ValueError("node ids must be exactly 0..n-1")
        link_ids = [l.id for l in self.links]
        if len(set(link_ids)) != len(link_ids):
            raise ValueError("duplicate link id")
        known = set(link_ids)
        for link in self.links:
            for end in (link.u, link.v):
                if not 0 <= end < len(node_ids):
                    raise ValueError(f"link {link.id} references unknown node {end}")
        for t in self.terminals or []:
            if not 0 <= t < len(node_ids):
                raise ValueError(f"terminal {t} is not a node")
        for w in self.conflict.weights or []:
            if w.e not in known or w.f not in known:
                raise ValueError(f"weight ({w.e}, {w.f}) references an unknown link")
            if w.e == w.f:
                raise ValueError(f"weight ({w.e}, {w.e}) is a self weight")
        if self.conflict.model == "explicit" and self.conflict.weights is None:
            raise ValueError("explicit conflict model needs weights")
        if self.order == "explicit":
            if self.permutation is None or sorted(self.permutation) != sorted(link_ids):
                raise ValueError("explicit order needs a permutation of the link ids")
        return self


class Verification(_Record):
    feasible: bool
    spanning: bool
    partition: bool
    first_violation: Optional[str] = None


class ReportStats(_Record):
    slot_count: int
    slot_sizes: List[int] = Field(default_factory=list)
    rho_estimate: Optional[float] = None
    load: Optional[int] = None
    runtime_ms: Optional[float] = None


class ScheduleReport(_Record):
    format: Literal[1] = FORMAT_VERSION
    algorithm: str
    dual: bool = False
    slots: List[List[int]]
    tree: List[int]
    stats: ReportStats
    verification: Verification


class OracleReport(_Record):
    format: Literal[1] = FORMAT_VERSION
    mode: Literal["forest", "schedule", "steiner"]
    optimum: int
    witness: List[List[int]]
    baseline: Optional[int] = None
    baseline_source: Optional[str] = None
    ratio: Optional[float] = None


Model = TypeVar("Model", bound=BaseModel)


def dumps_canonical(model: BaseModel) -> str:
    data = model.model_dump(mode="json", exclude_none=True)
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_model(model: BaseModel, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(dumps_canonical(model))
    logger.debug(f"Wrote {type(model).__name__} to {path}")


def parse_model(kind: Type[Model], text: str, source: str = "<string>") -> Model:
    try:
        return kind.model_validate_json(text)
    except ValidationError as e:
        raise InstanceFormatError(f"{source}: invalid {kind.__name__}: {e}") from e


def read_model(kind: Type[Model], path: Union[str, Path]) -> Model:
    path = Path(path)
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as e:
        raise InstanceFormatError(f"cannot read {path}: {e}") from e
    return parse_model(kind, text, str(path))


def load_instance(path: Union[str, Path]) -> InstanceFile:
    return read_model(InstanceFile, path)


def load_report(path: Union[str, Path]) -> ScheduleReport:
    return read_model(ScheduleReport, path)


@dataclass(frozen=True)
class Problem:
    graph: LinkGraph
    conflict: ConflictGraph
    terminals: Optional[Tuple[int, ...]]
    params: Optional[SinrParams] = None
    power: Optional[PowerScheme] = None


def sinr_settings(params: Optional[ConflictParams]) -> Tuple[SinrParams, PowerScheme]:
    params = params or ConflictParams()
    sinr = SinrParams(alpha=params.alpha if params.alpha is not None else 3.0,
                      beta=params.beta if params.beta is not None else 1.0,
                      noise=params.noise if params.noise is not None else 0.0)
    record = params.power or PowerRecord()
    if record.kind == "uniform":
        power = PowerScheme.uniform()
    else:
        power = PowerScheme.length_exponent(record.tau if record.tau is not None else 0.0)
    return sinr, power


def build_graph(instance: InstanceFile) -> LinkGraph:
    coords = {n.id: (n.x, n.y) for n in instance.nodes}
    endpoints, lengths, geometry, ids = [], [], [], []
    for link in instance.links:
        endpoints.append((link.u, link.v))
        lengths.append(link.length)
        ids.append(link.id)
        if None not in (link.sx, link.sy, link.rx, link.ry):
            geometry.append(((link.sx, link.sy), (link.rx, link.ry)))
        elif None not in coords[link.u] and None not in coords[link.v]:
            geometry.append((coords[link.u], coords[link.v]))
        else:
            geometry.append(None)
    return make_graph(len(instance.nodes), endpoints, lengths=lengths, geometry=geometry, link_ids=ids)


def build_problem(instance: InstanceFile) -> Problem:
    """Link graph and conflict graph described by an instance file."""
    graph = build_graph(instance)
    spec = instance.conflict
    params = power = None
    order_key = graph.lengths() if graph.has_lengths else None

    if spec.model == "explicit":
        weights = {(w.e, w.f): w.w for w in spec.weights}
        conflict = ConflictGraph(graph.link_ids, weights, order_key=order_key)
    elif spec.model == "l2":
        conflict = l2_conflict_graph(graph)
    elif spec.model == "line":
        conflict = line_graph_conflicts(graph)
    else:
        links = geo_links(graph)
        extra = spec.params or ConflictParams()
        if spec.model == "sinr":
            params, power = sinr_settings(spec.params)
            availability = graph if extra.missing_links else None
            conflict = sinr_conflict_graph(links, params, power, availability=availability)
        elif spec.model == "disk":
            if extra.K is None:
                raise InstanceFormatError("disk model needs params.K")
            conflict = disk_conflict_graph(links, extra.K)
        else:
            if extra.K1 is None or extra.K2 is None:
                raise InstanceFormatError("protocol model needs params.K1 and params.K2")
            conflict = protocol_conflict_graph(links, extra.K1, extra.K2)

    if instance.order == "explicit":
        conflict = ConflictGraph(conflict.universe, conflict.weights(), order=instance.permutation)

    terminals = tuple(instance.terminals) if instance.terminals is not None else None
    return Problem(graph, conflict, terminals, params, power)


def instance_from_graph(graph: LinkGraph, conflict: ConflictSpec,
                        positions: Optional[List[Tuple[float, float]]] = None,
                        terminals: Optional[List[int]] = None) -> InstanceFile:
    """Instance file for a generated link graph."""
    nodes = []
    for node in range(graph.node_count):
        if positions is not None:
            x, y = positions[node]
            nodes.append(NodeRecord(id=node, x=x, y=y))
        else:
            nodes.append(NodeRecord(id=node))
    links = []
    for link in graph.links:
        fields = dict(id=link.link_id, u=link.u, v=link.v, length=link.length)
        if link.has_geometry and positions is None:
            fields.update(sx=link.sender[0], sy=link.sender[1], rx=link.receiver[0], ry=link.receiver[1])
        links.append(LinkRecord(**fields))
    return InstanceFile(nodes=nodes, links=links, terminals=terminals, conflict=conflict)


def report_from_schedule(schedule: Schedule, check: ScheduleCheck, rho: Optional[float] = None,
                         runtime_ms: Optional[float] = None) -> ScheduleReport:
    load = schedule.extra.get("load")
    return ScheduleReport(
        algorithm=schedule.algorithm,
        dual=schedule.reversed_copies,
        slots=schedule.sorted_slots(),
        tree=sorted(schedule.tree),
        stats=ReportStats(slot_count=schedule.slot_count, slot_sizes=list(schedule.slot_sizes),
                          rho_estimate=rho, load=int(load) if load is not None else None,
                          runtime_ms=runtime_ms),
        verification=Verification(feasible=check.feasible, spanning=check.spanning,
                                  partition=check.partition, first_violation=check.first_violation),
    )


def schedule_from_report(report: ScheduleReport) -> Schedule:
    """Rebuild a Schedule from a report; the report's tree field is kept as-is."""
    slots = tuple(frozenset(slot) for slot in report.slots)
    return Schedule(slots, frozenset(report.tree), report.algorithm, report.dual)
