"""Release-aware list scheduling of the inference DAG on homogeneous cores."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .instance import ALIGNMENT, HEAD, DagGraph, Instance
from .comm import CommSchedule

__all__ = [
    "InfeasibleUploadError",
    "ReleaseMap",
    "ExecutionSchedule",
    "propagate_releases",
    "barrier_releases",
    "bottom_levels",
    "data_ready_time",
    "candidate_start_finish",
    "dag_feature_matrix",
    "schedule_dag_policy",
    "schedule_dag_greedy",
]

DAG_FEATURE_NAMES = (
    "bottom_level",
    "compute_time",
    "successor_count",
    "neg_predecessor_count",
    "fusion_chain",
    "cross_branch",
    "neg_release",
    "neg_mean_core_availability",
)


class InfeasibleUploadError(RuntimeError):
    """Some stream never finished uploading, so releases are undefined."""


@dataclass(frozen=True)
class ReleaseMap:
    """Release lower bounds in seconds; nodes absent from the map are
    unconstrained (no sentinel value enters start-time arithmetic)."""

    values: dict  # node -> seconds

    def get(self, v: int):
        return self.values.get(v)


def propagate_releases(comm: CommSchedule, inst: Instance) -> ReleaseMap:
    """Map upload completion times onto branch-entry release times."""
    rel = {}
    for k, tau in enumerate(comm.completion_slots):
        if tau is None:
            raise InfeasibleUploadError(f"stream {k} did not finish uploading")
        rel[inst.dag.entries[k]] = tau * inst.radio.slot_s
    return ReleaseMap(rel)


def barrier_releases(comm: CommSchedule, inst: Instance) -> ReleaseMap:
    """Decoupled semantics: every entry waits for the last upload."""
    if not comm.finished:
        raise InfeasibleUploadError("not all streams finished uploading")
    barrier = max(comm.completion_slots) * inst.radio.slot_s
    return ReleaseMap({e: barrier for e in inst.dag.entries})


def bottom_levels(dag: DagGraph) -> np.ndarray:
    """Longest remaining compute path from each node, inclusive of itself."""
    order = dag.topological_order()
    bl = np.zeros(dag.num_nodes)
    for v in reversed(order):
        tail = max((bl[w] for w in dag.succs[v]), default=0.0)
        bl[v] = dag.nodes[v].compute_s + tail
    return bl


@dataclass
class ExecutionSchedule:
    """Per-node core assignment, start, and finish (seconds)."""

    core: np.ndarray
    start: np.ndarray
    finish: np.ndarray

    @property
    def makespan(self) -> float:
        return float(self.finish.max())

    def core_timelines(self, num_cores: int) -> list:
        """Sorted (start, finish, node) intervals per core."""
        lanes = [[] for _ in range(num_cores)]
        for v in range(len(self.core)):
            lanes[int(self.core[v])].append((float(self.start[v]), float(self.finish[v]), v))
        for lane in lanes:
            lane.sort()
        return lanes

    def write_csv(self, path, inst: Instance) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["node", "class", "core", "start_ms", "finish_ms"])
            for v in range(len(self.core)):
                w.writerow(
                    [
                        v,
                        inst.dag.classes[v],
                        int(self.core[v]),
                        repr(float(self.start[v]) * 1e3),
                        repr(float(self.finish[v]) * 1e3),
                    ]
                )


def data_ready_time(u: int, v: int, candidate_core: int, partial: ExecutionSchedule, inst: Instance) -> float:
    """When node u's output is readable by v on the candidate core.

    Same-core placement reuses the on-chip buffer; otherwise the handoff
    pays the off-chip write+read pair.
    """
    nu, nv = inst.dag.nodes[u], inst.dag.nodes[v]
    if int(partial.core[u]) == candidate_core:
        return float(partial.finish[u]) + nu.on_write_s + nv.on_read_s
    return float(partial.finish[u]) + nu.off_write_s + nv.off_read_s


def candidate_start_finish(
    v: int,
    c: int,
    core_avail,
    partial: ExecutionSchedule,
    releases: ReleaseMap,
    inst: Instance,
):
    """Candidate (start, finish) of v on core c given the partial schedule."""
    s = float(core_avail[c])
    rho = releases.get(v)
    if rho is not None:
        s = max(s, rho)
    for u in inst.dag.preds[v]:
        s = max(s, data_ready_time(u, v, c, partial, inst))
    return s, s + inst.dag.nodes[v].compute_s


def _structure_arrays(inst: Instance):
    """CSR adjacency, cost vectors, class indicators — cached per instance."""
    if "dag_arrays" in inst._cache:
        return inst._cache["dag_arrays"]
    dag = inst.dag
    n = dag.num_nodes
    pred_ptr = np.zeros(n + 1, dtype=np.int64)
    succ_ptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        pred_ptr[v + 1] = pred_ptr[v] + len(dag.preds[v])
        succ_ptr[v + 1] = succ_ptr[v] + len(dag.succs[v])
    pred_idx = np.array([u for v in range(n) for u in dag.preds[v]], dtype=np.int64)
    succ_idx = np.array([w for v in range(n) for w in dag.succs[v]], dtype=np.int64)
    p = np.array([s.compute_s for s in dag.nodes])
    w_on = np.array([s.on_write_s for s in dag.nodes])
    r_on = np.array([s.on_read_s for s in dag.nodes])
    w_off = np.array([s.off_write_s for s in dag.nodes])
    r_off = np.array([s.off_read_s for s in dag.nodes])
    chain = np.array([1.0 if c in (ALIGNMENT, HEAD) else 0.0 for c in dag.classes])
    # cross-branch aggregators: alignment nodes and the fusion node
    heads = [v for v in range(n) if dag.classes[v] == HEAD]
    fusion = min(heads) if heads else -1
    cross = np.array(
        [1.0 if (dag.classes[v] == ALIGNMENT or v == fusion) else 0.0 for v in range(n)]
    )
    arrays = dict(
        pred_ptr=pred_ptr,
        pred_idx=pred_idx,
        succ_ptr=succ_ptr,
        succ_idx=succ_idx,
        p=p,
        w_on=w_on,
        r_on=r_on,
        w_off=w_off,
        r_off=r_off,
        bottom=bottom_levels(dag),
        chain=chain,
        cross=cross,
    )
    inst._cache["dag_arrays"] = arrays
    return arrays


def _release_arrays(releases: ReleaseMap, n: int):
    has_rel = np.zeros(n, dtype=np.bool_)
    rel = np.zeros(n)
    for v, t in releases.values.items():
        has_rel[v] = True
        rel[v] = t
    return has_rel, rel


def dag_feature_matrix(ready, releases: ReleaseMap, core_avail, inst: Instance):
    """Normalized feature rows for the ready set (same convention as comm)."""
    arr = _structure_arrays(inst)
    mean_chi = float(np.mean(core_avail))
    raw = np.empty((len(ready), 8))
    for row, v in enumerate(ready):
        rho = releases.get(v)
        raw[row] = (
            arr["bottom"][v],
            arr["p"][v],
            len(inst.dag.succs[v]),
            -len(inst.dag.preds[v]),
            arr["chain"][v],
            arr["cross"][v],
            -(rho if rho is not None else 0.0),
            -mean_chi,
        )
    lo = raw.min(axis=0)
    hi = raw.max(axis=0)
    span = hi - lo
    out = np.zeros_like(raw)
    ok = span > 0
    out[:, ok] = (raw[:, ok] - lo[ok]) / span[ok]
    return out


def _schedule(inst: Instance, releases: ReleaseMap, beta, mu, use_policy: bool) -> ExecutionSchedule:
    arr = _structure_arrays(inst)
    has_rel, rel = _release_arrays(releases, inst.dag.num_nodes)
    core, start, finish = _kernels.dag_schedule(
        arr["pred_ptr"],
        arr["pred_idx"],
        arr["succ_ptr"],
        arr["succ_idx"],
        arr["p"],
        arr["w_on"],
        arr["r_on"],
        arr["w_off"],
        arr["r_off"],
        has_rel,
        rel,
        arr["bottom"],
        arr["chain"],
        arr["cross"],
        inst.num_cores,
        np.asarray(beta, dtype=np.float64),
        np.asarray(mu, dtype=np.float64),
        use_policy,
    )
    return ExecutionSchedule(core=core, start=start, finish=finish)


def schedule_dag_policy(inst: Instance, releases: ReleaseMap, beta, mu) -> ExecutionSchedule:
    """Policy-scored list scheduling: node by weighted ready features, core by
    the mapping score (finish time plus locality terms)."""
    beta = np.asarray(beta, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    if beta.shape != (8,) or mu.shape != (4,):
        raise ValueError("beta must have 8 weights and mu 4")
    return _schedule(inst, releases, beta, mu, True)


def schedule_dag_greedy(inst: Instance, releases: ReleaseMap) -> ExecutionSchedule:
    """Fixed rule: bottom level descending (ties by node id), earliest finish core."""
    return _schedule(inst, releases, np.zeros(8), np.zeros(4), False)
