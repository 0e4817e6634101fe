import pytest

from jointsched import ConfigError, default_config, dump_config, load_config


def test_default_scenario_values(default_cfg):
    assert default_cfg.num_streams == 6
    assert default_cfg.num_subcarriers == 4
    assert default_cfg.rb_bandwidth_hz == 180e3
    assert default_cfg.horizon_slots == 1000
    assert default_cfg.sinr_threshold_db == 6.0
    assert default_cfg.shannon_gap == 1.0
    assert default_cfg.eta_max == 8.0
    assert default_cfg.payloads_kb == [0.2, 1.5, 5.0, 2.0, 7.0, 10.0]
    assert default_cfg.groups == [[0, 1, 2], [3, 4, 5]]
    assert default_cfg.branch_lengths == [5, 8, 5, 6, 5, 7]
    assert default_cfg.cores == 4
    assert default_cfg.sync_weight == 0.05
    assert default_cfg.sinr_range_db == (5.0, 20.0)


@pytest.mark.parametrize(
    "overrides, field",
    [
        (dict(num_subcarriers=0), "num_subcarriers"),
        (dict(slot_ms=0.0), "slot_ms"),
        (dict(payloads_kb=[]), "payloads_kb"),
        (dict(payloads_kb=[1.0, -2.0]), "payloads_kb"),
        (dict(groups=[[0, 1]]), "groups"),
        (dict(branch_lengths=[5, 5]), "branch_lengths"),
        (dict(cores=0), "cores"),
        (dict(p_range_ms=(5.0, 1.0)), "p_range_ms"),
        (dict(sync_weight=-0.1), "lambda"),
        (dict(sinr_mode="weird"), "mode"),
        (dict(on_chip_range_ms=(0.1, 3.0)), "on_chip_range_ms"),
    ],
)
def test_validation_names_offending_field(default_cfg, overrides, field):
    with pytest.raises(ConfigError, match=field):
        default_cfg.with_overrides(**overrides)


def test_yaml_round_trip(tmp_path, default_cfg):
    cfg = default_cfg.with_overrides(cores=6, sync_weight=0.1, sinr_mode="per_slot")
    path = tmp_path / "scenario.yaml"
    dump_config(cfg, path)
    assert load_config(path) == cfg


def test_load_partial_file_falls_back_to_defaults(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text("radio:\n  F: 2\nobjective:\n  lambda: 0.2\n")
    cfg = load_config(path)
    assert cfg.num_subcarriers == 2
    assert cfg.sync_weight == 0.2
    assert cfg.cores == default_config().cores


def test_load_rejects_unknown_keys(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text("radio:\n  bandwidth: 1\n")
    with pytest.raises(ConfigError, match="radio.bandwidth"):
        load_config(path)
    path.write_text("wireless:\n  F: 2\n")
    with pytest.raises(ConfigError, match="wireless"):
        load_config(path)
