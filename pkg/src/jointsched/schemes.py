"""The five end-to-end scheduling schemes.

Each scheme maps an Instance (plus a GA budget where applicable) to a full
communication + execution schedule and a fitness report. GA fitness
callbacks run on flat arrays for speed; the winning chromosome is re-decoded
through the documented module APIs so the stored schedules and report are
always mutually consistent.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .comm import CommSchedule, decode_comm_greedy_payload, decode_comm_policy
from .dagsched import (
    ExecutionSchedule,
    ReleaseMap,
    barrier_releases,
    propagate_releases,
    schedule_dag_greedy,
    schedule_dag_policy,
    _structure_arrays,
)
from .ga import GaParams, GaTrace, evolve
from .instance import Instance
from .objective import FitnessReport, fitness

__all__ = [
    "SCHEME_IDS",
    "SchemeResult",
    "run_ga_joint",
    "run_ga_dacs",
    "run_ga_dag",
    "run_decoupled_greedy",
    "run_joint_greedy",
    "run_scheme",
    "scheme_result_to_canonical_json",
]

SCHEME_IDS = ("decoupled-greedy", "joint-greedy", "ga-dag", "ga-dacs", "ga-joint")


@dataclass
class SchemeResult:
    scheme: str
    comm: CommSchedule
    exec_schedule: Optional[ExecutionSchedule]
    report: FitnessReport
    trace: Optional[GaTrace]
    policy: Optional[np.ndarray]
    releases: Optional[ReleaseMap]
    runtime_s: float


class _EvalContext:
    """Flat-array view of an instance for the GA fitness callbacks."""

    def __init__(self, inst: Instance, p_inv: float):
        self.inst = inst
        self.rates = inst.rates_bps()
        self.lin = inst.sinr_linear()
        self.payload = inst.payload_bits()
        self.group = inst.group_ids()
        self.num_groups = inst.dag.num_groups
        self.branch_len = inst.branch_lengths().astype(np.float64)
        self.dt = inst.radio.slot_s
        self.rmax = inst.radio.rb_bandwidth_hz * inst.radio.eta_max
        self.arr = _structure_arrays(inst)
        self.entries = np.array(inst.dag.entries, dtype=np.int64)
        self.num_cores = inst.num_cores
        self.lam = inst.sync_weight
        self.p_inv = p_inv
        n = inst.dag.num_nodes
        self.has_rel = np.zeros(n, dtype=np.bool_)
        self.has_rel[self.entries] = True
        self.zeros8 = np.zeros(8)
        self.zeros4 = np.zeros(4)

    def comm(self, alpha, use_policy):
        return _kernels.comm_decode(
            self.rates, self.lin, self.payload, self.group, self.num_groups,
            self.branch_len, alpha, self.dt, self.rmax, use_policy,
        )

    def dag(self, rel, beta, mu, use_policy):
        a = self.arr
        return _kernels.dag_schedule(
            a["pred_ptr"], a["pred_idx"], a["succ_ptr"], a["succ_idx"],
            a["p"], a["w_on"], a["r_on"], a["w_off"], a["r_off"],
            self.has_rel, rel, a["bottom"], a["chain"], a["cross"],
            self.num_cores, beta, mu, use_policy,
        )

    def objective(self, tau, finish) -> float:
        sync = _kernels._sync_penalty_from_tau(tau, self.group, self.num_groups, self.dt)
        return float(finish.max()) + self.lam * sync

    def releases_from_tau(self, tau):
        rel = np.zeros(self.inst.dag.num_nodes)
        rel[self.entries] = tau * self.dt
        return rel


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _ga_result(inst, scheme, comm, exec_schedule, trace, policy, releases, p_inv, runtime):
    report = fitness(comm, exec_schedule, inst, p_inv)
    return SchemeResult(
        scheme=scheme,
        comm=comm,
        exec_schedule=exec_schedule,
        report=report,
        trace=trace,
        policy=policy,
        releases=releases,
        runtime_s=runtime,
    )


def run_ga_joint(inst: Instance, ga: GaParams, map_fn=map) -> SchemeResult:
    """Evolve the full 20-dim policy (8 comm + 8 DAG priority + 4 mapping)."""
    ctx = _EvalContext(inst, ga.p_inv)

    def eval_fn(chrom):
        _, tau = ctx.comm(chrom[:8], True)
        if (tau < 0).any():
            return ctx.p_inv
        _, _, finish = ctx.dag(ctx.releases_from_tau(tau), chrom[8:16], chrom[16:20], True)
        return ctx.objective(tau, finish)

    def run():
        best, _, trace = evolve(ga, 20, eval_fn, map_fn=map_fn)
        comm = decode_comm_policy(inst, best[:8])
        if comm.finished:
            releases = propagate_releases(comm, inst)
            sched = schedule_dag_policy(inst, releases, best[8:16], best[16:20])
        else:
            releases, sched = None, None
        return comm, sched, trace, best, releases

    (comm, sched, trace, best, releases), dt = _timed(run)
    return _ga_result(inst, "ga-joint", comm, sched, trace, best, releases, ga.p_inv, dt)


def run_ga_dacs(inst: Instance, ga: GaParams, map_fn=map) -> SchemeResult:
    """Evolve the 8 comm weights; DAG side uses the fixed greedy scheduler."""
    ctx = _EvalContext(inst, ga.p_inv)

    def eval_fn(chrom):
        _, tau = ctx.comm(chrom, True)
        if (tau < 0).any():
            return ctx.p_inv
        _, _, finish = ctx.dag(ctx.releases_from_tau(tau), ctx.zeros8, ctx.zeros4, False)
        return ctx.objective(tau, finish)

    def run():
        best, _, trace = evolve(ga, 8, eval_fn, map_fn=map_fn)
        comm = decode_comm_policy(inst, best)
        if comm.finished:
            releases = propagate_releases(comm, inst)
            sched = schedule_dag_greedy(inst, releases)
        else:
            releases, sched = None, None
        return comm, sched, trace, best, releases

    (comm, sched, trace, best, releases), dt = _timed(run)
    return _ga_result(inst, "ga-dacs", comm, sched, trace, best, releases, ga.p_inv, dt)


def run_ga_dag(inst: Instance, ga: GaParams, map_fn=map) -> SchemeResult:
    """Fixed payload-greedy comm; evolve the 12 DAG-stage weights."""
    ctx = _EvalContext(inst, ga.p_inv)
    _, tau = ctx.comm(ctx.zeros8, False)
    uploads_ok = not (tau < 0).any()
    rel = ctx.releases_from_tau(tau) if uploads_ok else None

    def eval_fn(chrom):
        if not uploads_ok:
            return ctx.p_inv
        _, _, finish = ctx.dag(rel, chrom[:8], chrom[8:12], True)
        return ctx.objective(tau, finish)

    def run():
        best, _, trace = evolve(ga, 12, eval_fn, map_fn=map_fn)
        comm = decode_comm_greedy_payload(inst)
        if comm.finished:
            releases = propagate_releases(comm, inst)
            sched = schedule_dag_policy(inst, releases, best[:8], best[8:12])
        else:
            releases, sched = None, None
        return comm, sched, trace, best, releases

    (comm, sched, trace, best, releases), dt = _timed(run)
    return _ga_result(inst, "ga-dag", comm, sched, trace, best, releases, ga.p_inv, dt)


def run_decoupled_greedy(inst: Instance, p_inv: float = None) -> SchemeResult:
    """Payload-greedy uploads; DAG execution barriers on the last upload."""
    from .objective import DEFAULT_P_INV

    p_inv = DEFAULT_P_INV if p_inv is None else p_inv

    def run():
        comm = decode_comm_greedy_payload(inst)
        if comm.finished:
            releases = barrier_releases(comm, inst)
            sched = schedule_dag_greedy(inst, releases)
        else:
            releases, sched = None, None
        return comm, sched, releases

    (comm, sched, releases), dt = _timed(run)
    return _ga_result(inst, "decoupled-greedy", comm, sched, None, None, releases, p_inv, dt)


def run_joint_greedy(inst: Instance, p_inv: float = None, include_sync: bool = True) -> SchemeResult:
    """Per-RB myopic lookahead: grant the stream whose greedy completion
    projects the lowest end-to-end objective.

    include_sync=False makes the per-RB estimate minimize projected T_e2e
    alone instead of the full J; the reported fitness always uses full J.
    """
    from .objective import DEFAULT_P_INV

    p_inv = DEFAULT_P_INV if p_inv is None else p_inv
    ctx = _EvalContext(inst, p_inv)

    def run():
        a = ctx.arr
        grant, tau = _kernels.joint_greedy_comm(
            ctx.rates, ctx.payload, ctx.group, ctx.num_groups, ctx.dt,
            ctx.lam if include_sync else 0.0, p_inv, ctx.entries,
            a["pred_ptr"], a["pred_idx"], a["succ_ptr"], a["succ_idx"],
            a["p"], a["w_on"], a["r_on"], a["w_off"], a["r_off"],
            a["bottom"], a["chain"], a["cross"], ctx.num_cores,
        )
        F = inst.radio.num_subcarriers
        comm = CommSchedule(
            grants=[(int(k), i // F, i % F) for i, k in enumerate(grant) if k >= 0],
            completion_slots=[None if v < 0 else int(v) for v in tau],
            slot_s=ctx.dt,
        )
        if comm.finished:
            releases = propagate_releases(comm, inst)
            sched = schedule_dag_greedy(inst, releases)
        else:
            releases, sched = None, None
        return comm, sched, releases

    (comm, sched, releases), dt = _timed(run)
    return _ga_result(inst, "joint-greedy", comm, sched, None, None, releases, p_inv, dt)


def run_scheme(scheme: str, inst: Instance, ga: Optional[GaParams] = None, map_fn=map) -> SchemeResult:
    """Dispatch by scheme id string (see SCHEME_IDS). map_fn lets the GA
    schemes evaluate fitness in parallel (results are order-preserving, so
    the outcome is identical to the serial run)."""
    if scheme in ("ga-joint", "ga-dacs", "ga-dag"):
        if ga is None:
            ga = GaParams()
        return {"ga-joint": run_ga_joint, "ga-dacs": run_ga_dacs, "ga-dag": run_ga_dag}[scheme](inst, ga, map_fn)
    if scheme == "decoupled-greedy":
        return run_decoupled_greedy(inst, ga.p_inv if ga else None)
    if scheme == "joint-greedy":
        return run_joint_greedy(inst, ga.p_inv if ga else None)
    raise ValueError(f"unknown scheme: {scheme!r} (expected one of {SCHEME_IDS})")


def scheme_result_to_dict(res: SchemeResult, inst: Instance) -> dict:
    """JSON-ready form, self-contained enough to render a Gantt chart.
    Wall-clock runtime is deliberately excluded so a rerun with identical
    inputs serializes byte-identically."""
    out = {
        "scheme": res.scheme,
        "meta": {
            "num_streams": inst.num_streams,
            "num_cores": inst.num_cores,
            "node_classes": list(inst.dag.classes),
        },
        "grants": [list(g) for g in res.comm.grants],
        "completion_slots": res.comm.completion_slots,
        "slot_s": res.comm.slot_s,
        "report": {
            "e2e_s": res.report.e2e,
            "sync_s": res.report.sync,
            "group_mismatch_s": list(res.report.group_mismatch) if res.report.group_mismatch else None,
            "composite_s": res.report.composite,
            "feasible": res.report.feasible,
            "penalty_applied": res.report.penalty_applied,
        },
        "policy": None if res.policy is None else [float(x) for x in res.policy],
        "exec": None,
        "trace": None,
    }
    if res.exec_schedule is not None:
        out["exec"] = {
            "core": [int(c) for c in res.exec_schedule.core],
            "start_s": [float(s) for s in res.exec_schedule.start],
            "finish_s": [float(f) for f in res.exec_schedule.finish],
        }
    if res.trace is not None:
        out["trace"] = {
            "best_J_s": res.trace.best,
            "mean_J_s": res.trace.mean,
        }
    return out


def scheme_result_to_canonical_json(res: SchemeResult, inst: Instance) -> str:
    return json.dumps(scheme_result_to_dict(res, inst), sort_keys=True, separators=(",", ":"))
