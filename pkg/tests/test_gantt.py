import pytest

from jointsched.gantt import emit_gantt, render_gantt_svg
from jointsched.schemes import run_decoupled_greedy, scheme_result_to_dict

from conftest import make_instance


def test_render_decoupled_timeline(tmp_path, default_inst):
    res = run_decoupled_greedy(default_inst)
    emit_gantt(res, default_inst, tmp_path / "timeline.svg")
    svg = (tmp_path / "timeline.svg").read_text()
    assert svg.startswith("<svg")
    assert "last upload" in svg
    # one lane per stream and per core
    for k in range(default_inst.num_streams):
        assert f">stream {k}<" in svg
    for c in range(default_inst.num_cores):
        assert f">core {c}<" in svg


def test_refuses_infeasible_result(default_cfg):
    inst = make_instance(default_cfg.with_overrides(horizon_slots=3), 0)
    res = run_decoupled_greedy(inst)
    data = scheme_result_to_dict(res, inst)
    with pytest.raises(ValueError, match="infeasible"):
        render_gantt_svg(data)


def test_empty_core_lane_renders(default_cfg):
    # one chain on a 4-core machine leaves cores idle; the track still renders
    cfg = default_cfg.with_overrides(payloads_kb=[1.0], groups=[[0]], branch_lengths=[2])
    inst = make_instance(cfg, 0)
    res = run_decoupled_greedy(inst)
    svg = render_gantt_svg(scheme_result_to_dict(res, inst))
    assert ">core 3<" in svg
