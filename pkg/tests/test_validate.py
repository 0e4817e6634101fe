"""The validator must catch every planted violation class it claims to cover."""

import numpy as np
import pytest

from jointsched import (
    CommSchedule,
    ValidationError,
    decode_comm_greedy_payload,
    propagate_releases,
    schedule_dag_greedy,
    validate_comm,
    validate_exec,
    validate_result,
)
from jointsched.dagsched import ExecutionSchedule
from jointsched.schemes import run_decoupled_greedy

from conftest import make_instance


@pytest.fixture()
def inst(default_cfg):
    return make_instance(default_cfg, 11)


@pytest.fixture()
def good(inst):
    comm = decode_comm_greedy_payload(inst)
    sched = schedule_dag_greedy(inst, propagate_releases(comm, inst))
    return comm, sched


def test_accepts_valid_schedules(inst, good):
    comm, sched = good
    validate_comm(comm, inst)
    validate_exec(sched, comm, inst)


def test_rejects_double_granted_rb(inst, good):
    comm, _ = good
    bad = CommSchedule(
        grants=comm.grants + [(0, comm.grants[0][1], comm.grants[0][2])],
        completion_slots=comm.completion_slots,
        slot_s=comm.slot_s,
    )
    with pytest.raises(ValidationError, match="granted twice"):
        validate_comm(bad, inst)


def test_rejects_below_threshold_grant(inst, good):
    comm, _ = good
    k, t, f = next(
        (k, t, f)
        for k in range(inst.num_streams)
        for t in range(inst.radio.horizon_slots)
        for f in range(inst.radio.num_subcarriers)
        if inst.trace_db[k, t, f] < inst.radio.sinr_threshold_db
        and (t, f) not in comm.grant_map()
    )
    bad = CommSchedule(comm.grants + [(k, t, f)], comm.completion_slots, comm.slot_s)
    with pytest.raises(ValidationError, match="threshold"):
        validate_comm(bad, inst)


def test_rejects_wrong_completion_slot(inst, good):
    comm, _ = good
    slots = list(comm.completion_slots)
    slots[0] += 1
    with pytest.raises(ValidationError, match="completion"):
        validate_comm(CommSchedule(comm.grants, slots, comm.slot_s), inst)


def test_rejects_grant_to_drained_stream(inst, good):
    comm, _ = good
    tau0 = comm.completion_slots[0]
    t, f = next(
        (t, f)
        for t in range(tau0, inst.radio.horizon_slots)
        for f in range(inst.radio.num_subcarriers)
        if (t, f) not in comm.grant_map() and inst.trace_db[0, t, f] >= inst.radio.sinr_threshold_db
    )
    bad = CommSchedule(comm.grants + [(0, t, f)], comm.completion_slots, comm.slot_s)
    with pytest.raises(ValidationError, match="drained"):
        validate_comm(bad, inst)


def test_rejects_early_entry_start(inst, good):
    comm, sched = good
    bad = ExecutionSchedule(sched.core.copy(), sched.start.copy(), sched.finish.copy())
    entry = inst.dag.entries[0]
    bad.start[entry] = 0.0
    bad.finish[entry] = inst.dag.nodes[entry].compute_s
    with pytest.raises(ValidationError):
        validate_exec(bad, comm, inst)


def test_rejects_precedence_violation(inst, good):
    comm, sched = good
    bad = ExecutionSchedule(sched.core.copy(), sched.start.copy(), sched.finish.copy())
    u, v = inst.dag.edges[-1]
    shift = float(bad.start[v] - bad.start[u])
    bad.start[v] = bad.start[u]
    bad.finish[v] = bad.finish[v] - shift
    with pytest.raises(ValidationError, match="data-ready"):
        validate_exec(bad, comm, inst)


def test_rejects_core_overlap(inst, good):
    comm, sched = good
    bad = ExecutionSchedule(sched.core.copy(), sched.start.copy(), sched.finish.copy())
    lanes = bad.core_timelines(inst.num_cores)
    lane = max(lanes, key=len)
    _, _, v2 = sorted(lane)[1]
    s1, f1, v1 = sorted(lane)[0]
    bad.start[v2] = s1  # slide the second node onto the first
    bad.finish[v2] = s1 + inst.dag.nodes[v2].compute_s
    with pytest.raises(ValidationError):
        validate_exec(bad, comm, inst)


def test_rejects_bad_core_or_duration(inst, good):
    comm, sched = good
    bad = ExecutionSchedule(sched.core.copy(), sched.start.copy(), sched.finish.copy())
    bad.core[0] = inst.num_cores
    with pytest.raises(ValidationError, match="core"):
        validate_exec(bad, comm, inst)
    bad = ExecutionSchedule(sched.core.copy(), sched.start.copy(), sched.finish.copy())
    bad.finish[3] += 1e-3
    with pytest.raises(ValidationError, match="compute time"):
        validate_exec(bad, comm, inst)


def test_validate_result_end_to_end(inst):
    res = run_decoupled_greedy(inst)
    validate_result(res, inst)
