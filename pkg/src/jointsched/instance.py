"""Problem instances: radio trace + stream specs + inference DAG + core count.

An Instance is a fully specified scheduling problem. It is generated
deterministically from a (ScenarioConfig, seed) pair, or loaded from a
serialized JSON tree. Instances are treated as immutable after creation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .rng import generator

__all__ = [
    "RadioParams",
    "StreamSpec",
    "NodeSpec",
    "DagGraph",
    "Instance",
    "InstanceError",
    "generate_instance",
    "load_instance",
    "save_instance",
    "instance_to_canonical_json",
]

BRANCH = "branch"
ALIGNMENT = "alignment"
HEAD = "head"


class InstanceError(ValueError):
    """Raised when an instance violates a structural invariant."""


@dataclass(frozen=True)
class RadioParams:
    num_subcarriers: int
    rb_bandwidth_hz: float
    slot_s: float
    horizon_slots: int
    sinr_threshold_db: float
    shannon_gap: float
    eta_max: float

    def validate(self):
        if self.num_subcarriers < 1:
            raise InstanceError("num_subcarriers must be >= 1")
        if self.rb_bandwidth_hz <= 0:
            raise InstanceError("rb_bandwidth_hz must be > 0")
        if self.slot_s <= 0:
            raise InstanceError("slot_s must be > 0")
        if self.horizon_slots < 1:
            raise InstanceError("horizon_slots must be >= 1")
        if self.shannon_gap < 1:
            raise InstanceError("shannon_gap must be >= 1")
        if self.eta_max <= 0:
            raise InstanceError("eta_max must be > 0")


@dataclass(frozen=True)
class StreamSpec:
    payload_bits: float
    group: int
    branch_length: int


@dataclass(frozen=True)
class NodeSpec:
    """Per-node compute and memory-transfer costs, all in seconds."""

    compute_s: float
    on_read_s: float
    on_write_s: float
    off_read_s: float
    off_write_s: float


class DagGraph:
    """Inference DAG: per-stream branch chains, group alignment nodes, fusion head.

    Node ids are dense integers. Class per node is one of "branch",
    "alignment", "head". ``entries[k]`` is the branch-entry node of stream k.
    """

    def __init__(self, nodes, classes, edges, entries, num_groups):
        self.nodes: list[NodeSpec] = list(nodes)
        self.classes: list[str] = list(classes)
        self.edges: list[tuple[int, int]] = [(int(u), int(v)) for u, v in edges]
        self.entries: list[int] = [int(e) for e in entries]
        self.num_groups = int(num_groups)
        n = len(self.nodes)
        self.preds: list[list[int]] = [[] for _ in range(n)]
        self.succs: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceError(f"edge ({u},{v}) references unknown node")
            self.preds[v].append(u)
            self.succs[u].append(v)
        for lst in self.preds:
            lst.sort()
        for lst in self.succs:
            lst.sort()

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    def topological_order(self) -> list[int]:
        """Kahn topological sort; raises on cycles."""
        indeg = [len(p) for p in self.preds]
        ready = [v for v in range(self.num_nodes) if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for w in self.succs[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        if len(order) != self.num_nodes:
            raise InstanceError("acyclicity violated")
        return order

    def validate(self, num_streams: int):
        n = self.num_nodes
        if len(self.classes) != n:
            raise InstanceError("classes length must match node count")
        if len(self.entries) != num_streams:
            raise InstanceError("entry map must cover every stream")
        order = self.topological_order()  # raises "acyclicity violated"
        for k, e in enumerate(self.entries):
            if self.preds[e]:
                raise InstanceError(f"entry node {e} of stream {k} has predecessors")
        # every node reachable from some entry
        reach = set(self.entries)
        for v in order:
            if v in reach:
                reach.update(self.succs[v])
        if len(reach) != n:
            raise InstanceError("unreachable node(s) in DAG")
        align = [v for v in range(n) if self.classes[v] == ALIGNMENT]
        if len(align) != self.num_groups:
            raise InstanceError("one alignment node required per group")
        heads = [v for v in range(n) if self.classes[v] == HEAD]
        if not heads:
            raise InstanceError("fusion head must be non-empty")
        fusion = min(heads)
        if sorted(self.preds[fusion]) != sorted(align):
            raise InstanceError("fusion node predecessors must be the alignment nodes")
        for spec in self.nodes:
            for name in ("compute_s", "on_read_s", "on_write_s", "off_read_s", "off_write_s"):
                if getattr(spec, name) < 0:
                    raise InstanceError(f"node cost {name} must be >= 0")


@dataclass
class Instance:
    radio: RadioParams
    trace_db: np.ndarray  # shape (K, T, F), SINR in dB
    streams: list[StreamSpec]
    dag: DagGraph
    num_cores: int
    sync_weight: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def num_streams(self) -> int:
        return len(self.streams)

    def validate(self) -> "Instance":
        self.radio.validate()
        k = self.num_streams
        if k < 1:
            raise InstanceError("at least one stream required")
        if self.num_cores < 1:
            raise InstanceError("num_cores must be >= 1")
        if self.sync_weight < 0:
            raise InstanceError("sync_weight must be >= 0")
        expect = (k, self.radio.horizon_slots, self.radio.num_subcarriers)
        if self.trace_db.shape != expect:
            raise InstanceError(f"trace shape {self.trace_db.shape} != {expect}")
        if not np.isfinite(self.trace_db).all():
            raise InstanceError("trace contains non-finite SINR values")
        groups = sorted({s.group for s in self.streams})
        if groups != list(range(self.dag.num_groups)):
            raise InstanceError("stream groups must be 0..M-1 with every group populated")
        for i, s in enumerate(self.streams):
            if s.payload_bits <= 0:
                raise InstanceError(f"stream {i} payload must be > 0")
            if s.branch_length < 1:
                raise InstanceError(f"stream {i} branch_length must be >= 1")
        self.dag.validate(k)
        return self

    # cached derived arrays used by the decoders -------------------------

    def rates_bps(self) -> np.ndarray:
        """Achievable rate per (k, t, f); 0 below the SINR threshold."""
        if "rates" not in self._cache:
            lin = 10.0 ** (self.trace_db / 10.0)
            eta = np.minimum(
                np.log2(1.0 + lin / self.radio.shannon_gap), self.radio.eta_max
            )
            rates = self.radio.rb_bandwidth_hz * eta
            rates[self.trace_db < self.radio.sinr_threshold_db] = 0.0
            rates.setflags(write=False)
            self._cache["rates"] = rates
        return self._cache["rates"]

    def sinr_linear(self) -> np.ndarray:
        if "lin" not in self._cache:
            lin = 10.0 ** (self.trace_db / 10.0)
            lin.setflags(write=False)
            self._cache["lin"] = lin
        return self._cache["lin"]

    def payload_bits(self) -> np.ndarray:
        return np.array([s.payload_bits for s in self.streams], dtype=np.float64)

    def group_ids(self) -> np.ndarray:
        return np.array([s.group for s in self.streams], dtype=np.int64)

    def branch_lengths(self) -> np.ndarray:
        return np.array([s.branch_length for s in self.streams], dtype=np.int64)


def _wire_dag(cfg: ScenarioConfig):
    """Build edges/classes/entries for the branch->alignment->head layout.

    Node ids: branch chains stream by stream, then one alignment node per
    group, then the fusion-head chain (fusion, classifier, ..., output).
    """
    k = cfg.num_streams
    m = len(cfg.groups)
    classes, edges, entries = [], [], []
    terminal = []
    nid = 0
    for bl in cfg.branch_lengths:
        entries.append(nid)
        for j in range(bl):
            classes.append(BRANCH)
            if j > 0:
                edges.append((nid - 1, nid))
            nid += 1
        terminal.append(nid - 1)
    align_of_group = []
    for gi, members in enumerate(cfg.groups):
        align_of_group.append(nid)
        classes.append(ALIGNMENT)
        for s in sorted(members):
            edges.append((terminal[s], nid))
        nid += 1
    for j in range(cfg.head_len):
        classes.append(HEAD)
        if j == 0:
            for a in align_of_group:
                edges.append((a, nid))
        else:
            edges.append((nid - 1, nid))
        nid += 1
    return classes, edges, entries, m


def generate_instance(cfg: ScenarioConfig, seed: int) -> Instance:
    """Sample a deterministic Instance for (cfg, seed).

    SINR values are i.i.d. uniform over the configured dB range per RB (or
    per slot in "per_slot" mode); node compute/memory times are i.i.d.
    uniform over their configured ranges. The same (cfg, seed) always yields
    a bit-identical instance.
    """
    cfg.validate()
    k, t, f = cfg.num_streams, cfg.horizon_slots, cfg.num_subcarriers
    radio = RadioParams(
        num_subcarriers=f,
        rb_bandwidth_hz=float(cfg.rb_bandwidth_hz),
        slot_s=cfg.slot_ms * 1e-3,
        horizon_slots=t,
        sinr_threshold_db=float(cfg.sinr_threshold_db),
        shannon_gap=float(cfg.shannon_gap),
        eta_max=float(cfg.eta_max),
    )
    lo, hi = cfg.sinr_range_db
    rng = generator(seed, "sinr")
    if cfg.sinr_mode == "per_slot":
        per_slot = rng.uniform(lo, hi, size=(k, t, 1))
        trace = np.repeat(per_slot, f, axis=2)
    else:
        trace = rng.uniform(lo, hi, size=(k, t, f))

    group_of = {}
    for gi, members in enumerate(cfg.groups):
        for s in members:
            group_of[s] = gi
    streams = [
        StreamSpec(
            payload_bits=float(cfg.payloads_kb[i]) * 8000.0,
            group=group_of[i],
            branch_length=int(cfg.branch_lengths[i]),
        )
        for i in range(k)
    ]

    classes, edges, entries, m = _wire_dag(cfg)
    n = len(classes)
    crng = generator(seed, "compute")
    p = crng.uniform(cfg.p_range_ms[0], cfg.p_range_ms[1], size=n) * 1e-3
    mrng = generator(seed, "memory")
    on = mrng.uniform(cfg.on_chip_range_ms[0], cfg.on_chip_range_ms[1], size=(n, 2)) * 1e-3
    off = mrng.uniform(cfg.off_chip_range_ms[0], cfg.off_chip_range_ms[1], size=(n, 2)) * 1e-3
    nodes = [
        NodeSpec(
            compute_s=float(p[v]),
            on_read_s=float(on[v, 0]),
            on_write_s=float(on[v, 1]),
            off_read_s=float(off[v, 0]),
            off_write_s=float(off[v, 1]),
        )
        for v in range(n)
    ]
    dag = DagGraph(nodes, classes, edges, entries, m)
    inst = Instance(
        radio=radio,
        trace_db=trace,
        streams=streams,
        dag=dag,
        num_cores=int(cfg.cores),
        sync_weight=float(cfg.sync_weight),
    )
    inst.trace_db.setflags(write=False)
    return inst.validate()


# serialization -----------------------------------------------------------

_RADIO_FIELDS = [
    "num_subcarriers",
    "rb_bandwidth_hz",
    "slot_s",
    "horizon_slots",
    "sinr_threshold_db",
    "shannon_gap",
    "eta_max",
]
_NODE_FIELDS = ["compute_s", "on_read_s", "on_write_s", "off_read_s", "off_write_s"]


def instance_to_dict(inst: Instance) -> dict:
    return {
        "radio": {k: getattr(inst.radio, k) for k in _RADIO_FIELDS},
        "streams": [
            {"payload_bits": s.payload_bits, "group": s.group, "branch_length": s.branch_length}
            for s in inst.streams
        ],
        "dag": {
            "classes": inst.dag.classes,
            "edges": [list(e) for e in inst.dag.edges],
            "entries": inst.dag.entries,
            "num_groups": inst.dag.num_groups,
            "nodes": [{k: getattr(n, k) for k in _NODE_FIELDS} for n in inst.dag.nodes],
        },
        "num_cores": inst.num_cores,
        "sync_weight": inst.sync_weight,
        "trace_db": inst.trace_db.tolist(),
    }


def instance_to_canonical_json(inst: Instance) -> str:
    """Canonical JSON form (sorted keys, minimal separators) for golden files."""
    return json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))


def save_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(instance_to_canonical_json(inst))


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise InstanceError(f"missing field: {where}{key}")
    return mapping[key]


def instance_from_dict(data: dict) -> Instance:
    radio_raw = _require(data, "radio", "")
    radio = RadioParams(**{k: _require(radio_raw, k, "radio.") for k in _RADIO_FIELDS})
    streams = [
        StreamSpec(
            payload_bits=_require(s, "payload_bits", f"streams[{i}]."),
            group=_require(s, "group", f"streams[{i}]."),
            branch_length=_require(s, "branch_length", f"streams[{i}]."),
        )
        for i, s in enumerate(_require(data, "streams", ""))
    ]
    dag_raw = _require(data, "dag", "")
    nodes = [
        NodeSpec(**{k: _require(n, k, f"dag.nodes[{i}].") for k in _NODE_FIELDS})
        for i, n in enumerate(_require(dag_raw, "nodes", "dag."))
    ]
    dag = DagGraph(
        nodes,
        _require(dag_raw, "classes", "dag."),
        _require(dag_raw, "edges", "dag."),
        _require(dag_raw, "entries", "dag."),
        _require(dag_raw, "num_groups", "dag."),
    )
    trace = np.asarray(_require(data, "trace_db", ""), dtype=np.float64)
    trace.setflags(write=False)
    inst = Instance(
        radio=radio,
        trace_db=trace,
        streams=streams,
        dag=dag,
        num_cores=_require(data, "num_cores", ""),
        sync_weight=_require(data, "sync_weight", ""),
    )
    return inst.validate()


def load_instance(path) -> Instance:
    """Load and validate a serialized instance; rejects invariant violations."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"parse error at line {exc.lineno}: {exc.msg}") from exc
    return instance_from_dict(data)
