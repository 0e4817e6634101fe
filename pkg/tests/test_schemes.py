import json

import numpy as np
import pytest

from jointsched import (
    GaParams,
    decode_comm_greedy_payload,
    fitness,
    run_scheme,
    scheme_result_to_canonical_json,
    validate_result,
)
from jointsched.schemes import (
    SCHEME_IDS,
    run_decoupled_greedy,
    run_ga_dag,
    run_joint_greedy,
)

from conftest import BATCH_SEEDS, ga_for, make_instance

SMALL_GA = dict(population=10, generations=8)


def test_scheme_id_vocabulary():
    assert SCHEME_IDS == ("decoupled-greedy", "joint-greedy", "ga-dag", "ga-dacs", "ga-joint")
    with pytest.raises(ValueError, match="unknown scheme"):
        run_scheme("annealing", None)


@pytest.mark.parametrize("scheme", SCHEME_IDS)
def test_all_schemes_produce_valid_results(default_inst, scheme):
    res = run_scheme(scheme, default_inst, ga_for(0, scheme, **SMALL_GA))
    validate_result(res, default_inst)
    assert res.scheme == scheme
    assert res.report.feasible
    assert res.runtime_s >= 0.0


def test_reevaluation_consistency(default_inst):
    for scheme in SCHEME_IDS:
        res = run_scheme(scheme, default_inst, ga_for(0, scheme, **SMALL_GA))
        again = fitness(res.comm, res.exec_schedule, default_inst)
        assert again == res.report


def test_ga_dag_and_decoupled_share_comm(default_inst):
    a = run_ga_dag(default_inst, ga_for(0, "ga-dag", **SMALL_GA))
    b = run_decoupled_greedy(default_inst)
    assert a.comm.grants == b.comm.grants
    assert a.comm.completion_slots == b.comm.completion_slots


def test_decoupled_barrier_semantics(default_inst):
    res = run_decoupled_greedy(default_inst)
    barrier = max(res.comm.completion_slots) * res.comm.slot_s
    assert float(res.exec_schedule.start.min()) >= barrier - 1e-9
    assert set(res.releases.values.values()) == {barrier}


def test_single_stream_joint_greedy_equals_decoupled(default_cfg):
    cfg = default_cfg.with_overrides(
        payloads_kb=[5.0], groups=[[0]], branch_lengths=[4]
    )
    inst = make_instance(cfg, 3)
    jg = run_joint_greedy(inst)
    dg = run_decoupled_greedy(inst)
    assert jg.comm.grants == decode_comm_greedy_payload(inst).grants
    # with one stream the barrier equals the single release time
    assert jg.report.composite == pytest.approx(dg.report.composite, rel=1e-9)


def test_joint_greedy_objective_variant_flag(default_inst):
    full = run_joint_greedy(default_inst)
    e2e_only = run_joint_greedy(default_inst, include_sync=True)
    assert full.report == e2e_only.report  # default includes the sync term
    alt = run_joint_greedy(default_inst, include_sync=False)
    validate_result(alt, default_inst)


def test_infeasible_instance_reports_penalty(default_cfg):
    cfg = default_cfg.with_overrides(horizon_slots=3)
    inst = make_instance(cfg, 0)
    for scheme in SCHEME_IDS:
        res = run_scheme(scheme, inst, ga_for(0, scheme, population=6, generations=3))
        assert not res.report.feasible
        assert res.report.composite == 1e6
        assert res.exec_schedule is None
        validate_result(res, inst)


def test_ga_trace_present_only_for_ga_schemes(default_inst):
    for scheme in SCHEME_IDS:
        res = run_scheme(scheme, default_inst, ga_for(0, scheme, **SMALL_GA))
        if scheme.startswith("ga-"):
            assert res.trace is not None and res.policy is not None
            dim = {"ga-joint": 20, "ga-dacs": 8, "ga-dag": 12}[scheme]
            assert res.policy.shape == (dim,)
        else:
            assert res.trace is None and res.policy is None


def test_stored_best_matches_trace(default_inst):
    res = run_scheme("ga-joint", default_inst, ga_for(1, "ga-joint", **SMALL_GA))
    assert res.report.composite == pytest.approx(res.trace.best[-1], rel=1e-12)
    assert np.array_equal(res.policy, np.asarray(res.trace.best_chromosome[-1]))


def test_serialization_roundtrip_and_structure(default_inst):
    res = run_scheme("ga-dacs", default_inst, ga_for(0, "ga-dacs", **SMALL_GA))
    data = json.loads(scheme_result_to_canonical_json(res, default_inst))
    assert data["scheme"] == "ga-dacs"
    assert data["meta"]["num_streams"] == 6
    assert len(data["exec"]["core"]) == default_inst.dag.num_nodes
    assert data["report"]["feasible"] is True
    assert "runtime" not in json.dumps(data)


def test_ga_joint_beats_decoupled_on_default_seed(default_inst):
    ga = ga_for(0, "ga-joint", population=40, generations=36, stall_limit=None)
    joint = run_scheme("ga-joint", default_inst, ga)
    dec = run_decoupled_greedy(default_inst)
    assert joint.report.composite < dec.report.composite


def test_ga_dacs_close_to_ga_dag_on_wide_machine(default_cfg):
    # with cores >= DAG width the computation side has no contention, so
    # evolving the comm policy should match or beat evolving the DAG policy
    cfg = default_cfg.with_overrides(cores=6)
    wins = 0
    seeds = range(10)
    for seed in seeds:
        inst = make_instance(cfg, seed)
        dacs = run_scheme("ga-dacs", inst, ga_for(seed, "ga-dacs", **SMALL_GA))
        dag = run_scheme("ga-dag", inst, ga_for(seed, "ga-dag", **SMALL_GA))
        wins += dacs.report.composite <= dag.report.composite
    assert wins >= 7


def test_decoupled_largest_latency_trend(sv_batch):
    worse = sum(
        results["decoupled-greedy"].report.composite >= results["ga-dacs"].report.composite
        for _, results in sv_batch.runs.values()
    )
    assert worse >= int(0.8 * len(BATCH_SEEDS))


def test_joint_greedy_improves_on_decoupled_trend(sv_batch):
    wins = sum(
        results["joint-greedy"].report.composite <= results["decoupled-greedy"].report.composite
        for _, results in sv_batch.runs.values()
    )
    assert wins >= int(0.6 * len(BATCH_SEEDS))
