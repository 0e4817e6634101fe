"""Synchronization penalty, end-to-end latency, and composite fitness."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .comm import CommSchedule
from .dagsched import ExecutionSchedule, InfeasibleUploadError
from .instance import Instance

__all__ = ["FitnessReport", "sync_penalty", "end_to_end", "fitness", "DEFAULT_P_INV"]

# Must dominate any feasible objective at simulated scale so elitism never
# retains an infeasible policy.
DEFAULT_P_INV = 1e6


@dataclass(frozen=True)
class FitnessReport:
    """Composite objective breakdown; all times in seconds."""

    e2e: Optional[float]
    group_mismatch: Optional[tuple]
    sync: Optional[float]
    composite: float
    feasible: bool
    penalty_applied: bool

    def csv_row(self, scheme: str, seed) -> list:
        def ms(x):
            return "" if x is None else repr(x * 1e3)

        return [scheme, seed, ms(self.e2e), ms(self.sync), repr(self.composite * 1e3), int(self.feasible)]


def sync_penalty(comm: CommSchedule, inst: Instance):
    """Per-group completion-time spread and its total, in seconds."""
    times = comm.completion_times()
    if any(t is None for t in times):
        raise InfeasibleUploadError("sync penalty undefined with unfinished uploads")
    deltas = []
    for m in range(inst.dag.num_groups):
        member_times = [times[k] for k in range(inst.num_streams) if inst.streams[k].group == m]
        deltas.append(max(member_times) - min(member_times))
    return tuple(deltas), sum(deltas)


def end_to_end(exec_schedule: ExecutionSchedule) -> float:
    """Finish time of the last DAG node, in seconds."""
    return exec_schedule.makespan


def fitness(
    comm: CommSchedule,
    exec_schedule: Optional[ExecutionSchedule],
    inst: Instance,
    p_inv: float = DEFAULT_P_INV,
) -> FitnessReport:
    """Composite objective J = T_e2e + lambda * P_sync, or the infeasibility
    penalty when any upload missed the horizon (no schedule inspected then)."""
    if not comm.finished:
        return FitnessReport(
            e2e=None,
            group_mismatch=None,
            sync=None,
            composite=p_inv,
            feasible=False,
            penalty_applied=True,
        )
    if exec_schedule is None:
        raise ValueError("feasible uploads require an execution schedule")
    deltas, total = sync_penalty(comm, inst)
    t_e2e = end_to_end(exec_schedule)
    return FitnessReport(
        e2e=t_e2e,
        group_mismatch=deltas,
        sync=total,
        composite=t_e2e + inst.sync_weight * total,
        feasible=True,
        penalty_applied=False,
    )
