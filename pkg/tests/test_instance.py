import json

import numpy as np
import pytest

from jointsched import InstanceError, generate_instance, load_instance, save_instance
from jointsched.instance import (
    ALIGNMENT,
    BRANCH,
    HEAD,
    DagGraph,
    NodeSpec,
    instance_to_canonical_json,
)

from conftest import make_instance


def test_default_instance_structure(default_inst):
    inst = default_inst
    assert inst.num_streams == 6
    assert [s.branch_length for s in inst.streams] == [5, 8, 5, 6, 5, 7]
    assert [s.group for s in inst.streams] == [0, 0, 0, 1, 1, 1]
    assert [s.payload_bits for s in inst.streams] == [
        1600.0, 12000.0, 40000.0, 16000.0, 56000.0, 80000.0,
    ]
    assert inst.radio.num_subcarriers == 4
    assert inst.radio.rb_bandwidth_hz == 180e3
    assert inst.radio.horizon_slots == 1000
    assert inst.radio.sinr_threshold_db == 6.0
    assert inst.sync_weight == 0.05
    # 36 branch nodes + 2 alignment + 3 head = 41
    assert inst.dag.num_nodes == 41
    assert inst.dag.classes.count(BRANCH) == 36
    assert inst.dag.classes.count(ALIGNMENT) == 2
    assert inst.dag.classes.count(HEAD) == 3
    assert inst.trace_db.shape == (6, 1000, 4)


def test_dag_wiring_invariants(default_inst):
    dag = default_inst.dag
    assert len(dag.entries) == 6
    for e in dag.entries:
        assert dag.preds[e] == []
    # alignment in-degree equals group size; fusion preds are the alignments
    align = [v for v in range(dag.num_nodes) if dag.classes[v] == ALIGNMENT]
    assert [len(dag.preds[a]) for a in align] == [3, 3]
    fusion = min(v for v in range(dag.num_nodes) if dag.classes[v] == HEAD)
    assert sorted(dag.preds[fusion]) == align
    assert len(dag.topological_order()) == dag.num_nodes


def test_minimal_wiring_single_stream(default_cfg):
    cfg = default_cfg.with_overrides(
        payloads_kb=[1.0], groups=[[0]], branch_lengths=[1]
    )
    inst = make_instance(cfg, 0)
    # 1 branch + 1 alignment + 3 head = 5 nodes in a single chain
    assert inst.dag.num_nodes == 5
    assert inst.dag.classes == [BRANCH, ALIGNMENT, HEAD, HEAD, HEAD]
    assert inst.dag.edges == [(0, 1), (1, 2), (2, 3), (3, 4)]


def test_generation_is_deterministic(default_cfg):
    a = make_instance(default_cfg, 3)
    b = make_instance(default_cfg, 3)
    assert instance_to_canonical_json(a) == instance_to_canonical_json(b)
    c = make_instance(default_cfg, 4)
    assert instance_to_canonical_json(a) != instance_to_canonical_json(c)


def test_sampled_values_within_ranges(default_cfg, default_inst):
    inst = default_inst
    assert inst.trace_db.min() >= 5.0 and inst.trace_db.max() <= 20.0
    for n in inst.dag.nodes:
        assert 1e-3 <= n.compute_s <= 11e-3
        for v in (n.on_read_s, n.on_write_s):
            assert 0.1e-3 <= v <= 0.6e-3
        for v in (n.off_read_s, n.off_write_s):
            assert 2e-3 <= v <= 8e-3
        # off-chip dominates on-chip by construction of the ranges
        assert n.off_read_s >= n.on_read_s and n.off_write_s >= n.on_write_s


def test_per_slot_sinr_mode(default_cfg):
    inst = make_instance(default_cfg.with_overrides(sinr_mode="per_slot"), 0)
    assert np.all(inst.trace_db == inst.trace_db[:, :, :1])


def test_rates_zero_below_threshold(default_inst):
    rates = default_inst.rates_bps()
    below = default_inst.trace_db < default_inst.radio.sinr_threshold_db
    assert np.all(rates[below] == 0.0)
    assert np.all(rates[~below] > 0.0)
    assert rates.max() <= 180e3 * 8.0 + 1e-9


def test_serialization_round_trip(tmp_path, tiny_cfg):
    inst = make_instance(tiny_cfg, 5)
    path = tmp_path / "instance.json"
    save_instance(inst, path)
    loaded = load_instance(path)
    assert instance_to_canonical_json(loaded) == instance_to_canonical_json(inst)


def test_load_rejects_cycles(tmp_path, tiny_cfg):
    inst = make_instance(tiny_cfg, 0)
    path = tmp_path / "instance.json"
    save_instance(inst, path)
    data = json.loads(path.read_text())
    data["dag"]["edges"].append([5, 2])  # head output back into the fusion chain
    path.write_text(json.dumps(data))
    with pytest.raises(InstanceError, match="acyclicity violated"):
        load_instance(path)


def test_load_names_missing_field(tmp_path, tiny_cfg):
    inst = make_instance(tiny_cfg, 0)
    path = tmp_path / "instance.json"
    save_instance(inst, path)
    data = json.loads(path.read_text())
    del data["radio"]["sinr_threshold_db"]
    path.write_text(json.dumps(data))
    with pytest.raises(InstanceError, match="sinr_threshold"):
        load_instance(path)


def test_load_reports_parse_error_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"radio": {\n  "oops"\n}')
    with pytest.raises(InstanceError, match="line"):
        load_instance(path)


def test_dag_validate_rejects_bad_fusion_wiring():
    spec = NodeSpec(1e-3, 1e-4, 1e-4, 1e-3, 1e-3)
    # fusion node skips the alignment layer entirely
    dag = DagGraph(
        nodes=[spec] * 4,
        classes=[BRANCH, ALIGNMENT, HEAD, HEAD],
        edges=[(0, 1), (0, 2), (2, 3)],
        entries=[0],
        num_groups=1,
    )
    with pytest.raises(InstanceError, match="fusion"):
        dag.validate(1)
