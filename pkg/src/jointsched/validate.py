"""Independent schedule validator.

Replays every constraint directly from the Instance and the produced
schedules: RB exclusivity, SINR threshold feasibility, payload conservation
and completion minimality, precedence with realized transfer delays,
release-time respect, and per-core non-overlap. Deliberately self-contained:
rates are recomputed here from first principles rather than through the
decoder code paths.
"""

from __future__ import annotations

import math

from .comm import CommSchedule
from .dagsched import ExecutionSchedule
from .instance import Instance

__all__ = ["ValidationError", "validate_comm", "validate_exec", "validate_result"]

EPS = 1e-9


class ValidationError(AssertionError):
    """A schedule violates one of the replayed constraints."""


def _rate(inst: Instance, k: int, t: int, f: int) -> float:
    gamma = inst.trace_db[k, t, f]
    if gamma < inst.radio.sinr_threshold_db:
        return 0.0
    eta = min(
        math.log2(1.0 + 10.0 ** (gamma / 10.0) / inst.radio.shannon_gap),
        inst.radio.eta_max,
    )
    return inst.radio.rb_bandwidth_hz * eta


def validate_comm(comm: CommSchedule, inst: Instance) -> None:
    """Check exclusivity, threshold feasibility, and queue/completion replay."""
    radio = inst.radio
    grant_of = {}
    for k, t, f in comm.grants:
        if not (0 <= t < radio.horizon_slots and 0 <= f < radio.num_subcarriers):
            raise ValidationError(f"grant ({k},{t},{f}) outside the horizon")
        if (t, f) in grant_of:
            raise ValidationError(f"RB ({t},{f}) granted twice")
        grant_of[(t, f)] = k
        if inst.trace_db[k, t, f] < radio.sinr_threshold_db:
            raise ValidationError(f"grant ({k},{t},{f}) below SINR threshold")

    residual = [s.payload_bits for s in inst.streams]
    tau = [None] * inst.num_streams
    for t in range(radio.horizon_slots):
        for f in range(radio.num_subcarriers):
            k = grant_of.get((t, f))
            if k is None:
                continue
            if residual[k] <= 0.0:
                raise ValidationError(f"grant ({k},{t},{f}) to an already-drained stream")
            residual[k] = max(0.0, residual[k] - _rate(inst, k, t, f) * radio.slot_s)
            if residual[k] == 0.0 and tau[k] is None:
                tau[k] = t + 1
    for k in range(inst.num_streams):
        if tau[k] != comm.completion_slots[k]:
            raise ValidationError(
                f"stream {k}: replayed completion {tau[k]} != recorded {comm.completion_slots[k]}"
            )
        if tau[k] is None and residual[k] <= 0.0:
            raise ValidationError(f"stream {k} drained but marked unfinished")


def validate_exec(
    sched: ExecutionSchedule,
    comm: CommSchedule,
    inst: Instance,
) -> None:
    """Check start/finish consistency, release respect, precedence with
    transfer delays, and per-core interval disjointness."""
    dag = inst.dag
    n = dag.num_nodes
    if len(sched.core) != n:
        raise ValidationError("execution schedule does not cover all nodes")
    for v in range(n):
        c = int(sched.core[v])
        if not 0 <= c < inst.num_cores:
            raise ValidationError(f"node {v} assigned to invalid core {c}")
        if sched.start[v] < -EPS:
            raise ValidationError(f"node {v} starts before time 0")
        if abs(sched.finish[v] - (sched.start[v] + dag.nodes[v].compute_s)) > EPS:
            raise ValidationError(f"node {v}: finish != start + compute time")
    for k, entry in enumerate(dag.entries):
        tau = comm.completion_slots[k]
        if tau is None:
            raise ValidationError(f"stream {k} unfinished but DAG was scheduled")
        if sched.start[entry] < tau * inst.radio.slot_s - EPS:
            raise ValidationError(f"entry node {entry} starts before stream {k} release")
    for u, v in dag.edges:
        if int(sched.core[u]) == int(sched.core[v]):
            handoff = dag.nodes[u].on_write_s + dag.nodes[v].on_read_s
        else:
            handoff = dag.nodes[u].off_write_s + dag.nodes[v].off_read_s
        if sched.start[v] < sched.finish[u] + handoff - EPS:
            raise ValidationError(f"edge ({u},{v}): start violates data-ready time")
    for c in range(inst.num_cores):
        intervals = sorted(
            (float(sched.start[v]), float(sched.finish[v]), v)
            for v in range(n)
            if int(sched.core[v]) == c
        )
        for (s1, f1, v1), (s2, f2, v2) in zip(intervals, intervals[1:]):
            if s2 < f1 - EPS:
                raise ValidationError(f"core {c}: nodes {v1} and {v2} overlap")


def validate_result(result, inst: Instance) -> None:
    """Validate a SchemeResult end-to-end (comm always; exec when feasible)."""
    validate_comm(result.comm, inst)
    if result.report.feasible:
        if result.exec_schedule is None:
            raise ValidationError("feasible result lacks an execution schedule")
        validate_exec(result.exec_schedule, result.comm, inst)
    elif result.exec_schedule is not None:
        raise ValidationError("infeasible result carries an execution schedule")
