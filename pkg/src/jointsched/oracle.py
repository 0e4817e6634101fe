"""Exhaustive brute-force solver for tiny instances.

Enumerates every per-RB grant choice (eligible streams plus idle), every
topological node order, and every core assignment under the same
append-only core-timeline semantics as the list schedulers, so the returned
optimum is the true minimum within the implemented schedule class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .comm import CommSchedule
from .dagsched import ExecutionSchedule
from .instance import Instance
from .objective import DEFAULT_P_INV

import numpy as np

__all__ = ["OracleLimits", "OracleLimitError", "OracleResult", "brute_force_optimum"]


class OracleLimitError(RuntimeError):
    """Instance or search size exceeds the enumeration limits (explicit refusal)."""


@dataclass(frozen=True)
class OracleLimits:
    max_streams: int = 2
    max_slots: int = 6
    max_subcarriers: int = 1
    max_nodes: int = 6
    max_cores: int = 2
    max_states: int = 5_000_000


@dataclass
class OracleResult:
    j_star: float
    comm: Optional[CommSchedule]
    exec_schedule: Optional[ExecutionSchedule]


class _Budget:
    __slots__ = ("used", "limit")

    def __init__(self, limit):
        self.used = 0
        self.limit = limit

    def spend(self, n=1):
        self.used += n
        if self.used > self.limit:
            raise OracleLimitError(f"search state budget exceeded ({self.limit})")


def _rate(inst, k, t, f):
    gamma = inst.trace_db[k, t, f]
    if gamma < inst.radio.sinr_threshold_db:
        return 0.0
    eta = min(
        math.log2(1.0 + 10.0 ** (gamma / 10.0) / inst.radio.shannon_gap),
        inst.radio.eta_max,
    )
    return inst.radio.rb_bandwidth_hz * eta


def _enumerate_comm(inst: Instance, budget: _Budget):
    """All reachable completion-slot vectors with one witness grant list each."""
    radio = inst.radio
    K = inst.num_streams
    rbs = [(t, f) for t in range(radio.horizon_slots) for f in range(radio.num_subcarriers)]
    outcomes = {}

    def rec(i, residual, tau, grants):
        budget.spend()
        if all(x is not None for x in tau) or i == len(rbs):
            key = tuple(tau)
            if key not in outcomes:
                outcomes[key] = list(grants)
            return
        t, f = rbs[i]
        eligible = [
            k for k in range(K) if residual[k] > 0.0 and _rate(inst, k, t, f) > 0.0
        ]
        # idle branch
        rec(i + 1, residual, tau, grants)
        for k in eligible:
            nres = list(residual)
            ntau = list(tau)
            nres[k] = max(0.0, nres[k] - _rate(inst, k, t, f) * radio.slot_s)
            if nres[k] == 0.0:
                ntau[k] = t + 1
            grants.append((k, t, f))
            rec(i + 1, nres, ntau, grants)
            grants.pop()

    rec(0, [s.payload_bits for s in inst.streams], [None] * K, [])
    return outcomes


def _replay_exec(inst: Instance, order, cores, releases):
    dag = inst.dag
    n = dag.num_nodes
    chi = [0.0] * inst.num_cores
    start = [0.0] * n
    finish = [0.0] * n
    for v, c in zip(order, cores):
        s = chi[c]
        rho = releases.get(v)
        if rho is not None:
            s = max(s, rho)
        for u in dag.preds[v]:
            if cores[order.index(u)] == c:
                ready = finish[u] + dag.nodes[u].on_write_s + dag.nodes[v].on_read_s
            else:
                ready = finish[u] + dag.nodes[u].off_write_s + dag.nodes[v].off_read_s
            s = max(s, ready)
        start[v] = s
        finish[v] = s + dag.nodes[v].compute_s
        chi[c] = finish[v]
    return start, finish


def _best_exec(inst: Instance, releases: dict, budget: _Budget):
    """Minimum makespan over all (topological order, core assignment) pairs."""
    dag = inst.dag
    n = dag.num_nodes
    best = [math.inf, None, None]  # makespan, order, cores
    core_of = [-1] * n
    finish = [0.0] * n
    order = []
    cores = []
    unsched_preds = [len(dag.preds[v]) for v in range(n)]
    scheduled = [False] * n

    def rec(count, chi, worst):
        budget.spend()
        if worst >= best[0]:
            return  # finishes only grow; prune
        if count == n:
            best[0] = worst
            best[1] = list(order)
            best[2] = list(cores)
            return
        for v in range(n):
            if scheduled[v] or unsched_preds[v] > 0:
                continue
            rho = releases.get(v)
            for c in range(inst.num_cores):
                s = chi[c]
                if rho is not None and rho > s:
                    s = rho
                for u in dag.preds[v]:
                    if core_of[u] == c:
                        ready = finish[u] + dag.nodes[u].on_write_s + dag.nodes[v].on_read_s
                    else:
                        ready = finish[u] + dag.nodes[u].off_write_s + dag.nodes[v].off_read_s
                    if ready > s:
                        s = ready
                f = s + dag.nodes[v].compute_s
                scheduled[v] = True
                core_of[v] = c
                finish[v] = f
                order.append(v)
                cores.append(c)
                for w in dag.succs[v]:
                    unsched_preds[w] -= 1
                old = chi[c]
                chi[c] = f
                rec(count + 1, chi, max(worst, f))
                chi[c] = old
                for w in dag.succs[v]:
                    unsched_preds[w] += 1
                order.pop()
                cores.pop()
                scheduled[v] = False
                core_of[v] = -1

    rec(0, [0.0] * inst.num_cores, 0.0)
    return best[0], best[1], best[2]


def brute_force_optimum(
    inst: Instance,
    limits: OracleLimits = OracleLimits(),
    p_inv: float = DEFAULT_P_INV,
) -> OracleResult:
    """Exhaustive optimum of the joint problem on a tiny instance.

    Raises OracleLimitError if the instance or the search exceeds the limits;
    never truncates silently. If no grant sequence finishes every upload,
    returns the infeasibility penalty with no witness.
    """
    if inst.num_streams > limits.max_streams:
        raise OracleLimitError("too many streams for exhaustive search")
    if inst.radio.horizon_slots > limits.max_slots:
        raise OracleLimitError("horizon too long for exhaustive search")
    if inst.radio.num_subcarriers > limits.max_subcarriers:
        raise OracleLimitError("too many subcarriers for exhaustive search")
    if inst.dag.num_nodes > limits.max_nodes:
        raise OracleLimitError("too many DAG nodes for exhaustive search")
    if inst.num_cores > limits.max_cores:
        raise OracleLimitError("too many cores for exhaustive search")

    budget = _Budget(limits.max_states)
    outcomes = _enumerate_comm(inst, budget)
    dt = inst.radio.slot_s
    group_of = [s.group for s in inst.streams]

    best_j = math.inf
    best_witness = None
    exec_memo = {}
    unreach = inst.radio.horizon_slots + 1
    for tau, grants in sorted(
        outcomes.items(), key=lambda kv: tuple(unreach if x is None else x for x in kv[0])
    ):
        if any(x is None for x in tau):
            continue
        sync = 0.0
        for m in range(inst.dag.num_groups):
            times = [tau[k] * dt for k in range(inst.num_streams) if group_of[k] == m]
            sync += max(times) - min(times)
        releases = {inst.dag.entries[k]: tau[k] * dt for k in range(inst.num_streams)}
        key = tuple(sorted(releases.items()))
        if key not in exec_memo:
            exec_memo[key] = _best_exec(inst, releases, budget)
        makespan, order, cores = exec_memo[key]
        j = makespan + inst.sync_weight * sync
        if j < best_j:
            best_j = j
            best_witness = (tau, grants, order, cores, releases)

    if best_witness is None:
        return OracleResult(j_star=p_inv, comm=None, exec_schedule=None)

    tau, grants, order, cores, releases = best_witness
    comm = CommSchedule(
        grants=[tuple(g) for g in grants],
        completion_slots=list(tau),
        slot_s=dt,
    )
    start, finish = _replay_exec(inst, order, cores, releases)
    core_arr = [0] * inst.dag.num_nodes
    for v, c in zip(order, cores):
        core_arr[v] = c
    sched = ExecutionSchedule(
        core=np.array(core_arr, dtype=np.int64),
        start=np.array(start),
        finish=np.array(finish),
    )
    return OracleResult(j_star=best_j, comm=comm, exec_schedule=sched)
