"""Scenario configuration: defaults, YAML loading, validation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import yaml

__all__ = ["ScenarioConfig", "ConfigError", "default_config", "load_config"]


class ConfigError(ValueError):
    """Raised when a scenario config is malformed; the message names the field."""


@dataclass
class ScenarioConfig:
    """All knobs needed to sample a problem instance.

    Times in the config are expressed in milliseconds (matching how the
    scenario magnitudes are usually quoted); payloads in kilobytes. The
    generated instance converts everything to seconds and bits.
    """

    # radio
    num_subcarriers: int = 4
    rb_bandwidth_hz: float = 180e3
    slot_ms: float = 1.0
    horizon_slots: int = 1000
    sinr_threshold_db: float = 6.0
    shannon_gap: float = 1.0
    eta_max: float = 8.0
    # streams
    payloads_kb: list = field(default_factory=lambda: [0.2, 1.5, 5.0, 2.0, 7.0, 10.0])
    groups: list = field(default_factory=lambda: [[0, 1, 2], [3, 4, 5]])
    branch_lengths: list = field(default_factory=lambda: [5, 8, 5, 6, 5, 7])
    # dag
    head_len: int = 3
    # compute
    cores: int = 4
    p_range_ms: tuple = (1.0, 11.0)
    on_chip_range_ms: tuple = (0.1, 0.6)
    off_chip_range_ms: tuple = (2.0, 8.0)
    # objective
    sync_weight: float = 0.05
    # sinr trace
    sinr_range_db: tuple = (5.0, 20.0)
    sinr_mode: str = "per_rb"  # or "per_slot": constant across subcarriers in a slot

    @property
    def num_streams(self) -> int:
        return len(self.payloads_kb)

    def validate(self) -> "ScenarioConfig":
        if self.num_subcarriers < 1:
            raise ConfigError("radio.num_subcarriers must be >= 1")
        if self.rb_bandwidth_hz <= 0:
            raise ConfigError("radio.rb_bandwidth_hz must be > 0")
        if self.slot_ms <= 0:
            raise ConfigError("radio.slot_ms must be > 0")
        if self.horizon_slots < 1:
            raise ConfigError("radio.horizon_slots must be >= 1")
        if self.shannon_gap < 1:
            raise ConfigError("radio.shannon_gap must be >= 1")
        if self.eta_max <= 0:
            raise ConfigError("radio.eta_max must be > 0")
        k = self.num_streams
        if k < 1:
            raise ConfigError("streams.payloads_kb must be non-empty")
        if any(p <= 0 for p in self.payloads_kb):
            raise ConfigError("streams.payloads_kb entries must be > 0")
        if len(self.branch_lengths) != k:
            raise ConfigError("streams.branch_lengths length must equal payload count")
        if any(b < 1 for b in self.branch_lengths):
            raise ConfigError("streams.branch_lengths entries must be >= 1")
        members = sorted(s for g in self.groups for s in g)
        if members != list(range(k)):
            raise ConfigError("streams.groups must partition stream indices 0..K-1")
        if any(len(g) == 0 for g in self.groups):
            raise ConfigError("streams.groups entries must be non-empty")
        if self.head_len < 1:
            raise ConfigError("dag.head_len must be >= 1")
        if self.cores < 1:
            raise ConfigError("compute.cores must be >= 1")
        for name, rng in (
            ("compute.p_range_ms", self.p_range_ms),
            ("compute.on_chip_range_ms", self.on_chip_range_ms),
            ("compute.off_chip_range_ms", self.off_chip_range_ms),
            ("sinr.range_db", self.sinr_range_db),
        ):
            if len(rng) != 2 or rng[0] > rng[1]:
                raise ConfigError(f"{name} must be (low, high) with low <= high")
        if self.on_chip_range_ms[1] > self.off_chip_range_ms[0]:
            raise ConfigError(
                "compute.on_chip_range_ms high must not exceed off_chip_range_ms low"
            )
        if self.sync_weight < 0:
            raise ConfigError("objective.lambda must be >= 0")
        if self.sinr_mode not in ("per_rb", "per_slot"):
            raise ConfigError("sinr.mode must be 'per_rb' or 'per_slot'")
        return self

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs).validate()


def default_config() -> ScenarioConfig:
    """The default evaluation scenario: K=6 streams, 4 cores, 4 subcarriers."""
    return ScenarioConfig().validate()


_SECTION_KEYS = {
    "radio": {
        "F": "num_subcarriers",
        "rb_bandwidth_hz": "rb_bandwidth_hz",
        "slot_ms": "slot_ms",
        "horizon_slots": "horizon_slots",
        "sinr_threshold_db": "sinr_threshold_db",
        "shannon_gap": "shannon_gap",
        "eta_max": "eta_max",
    },
    "streams": {
        "payloads_kb": "payloads_kb",
        "groups": "groups",
        "branch_lengths": "branch_lengths",
    },
    "dag": {"head_len": "head_len"},
    "compute": {
        "cores": "cores",
        "p_range_ms": "p_range_ms",
        "on_chip_range_ms": "on_chip_range_ms",
        "off_chip_range_ms": "off_chip_range_ms",
    },
    "objective": {"lambda": "sync_weight"},
    "sinr": {"range_db": "sinr_range_db", "mode": "sinr_mode"},
}

_TUPLE_FIELDS = {"p_range_ms", "on_chip_range_ms", "off_chip_range_ms", "sinr_range_db"}


def load_config(path) -> ScenarioConfig:
    """Load a YAML scenario file (sections: radio, streams, dag, compute, objective, sinr).

    Missing sections/keys fall back to the defaults; unknown keys are rejected.
    """
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    kwargs = {}
    for section, mapping in raw.items():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section: {section}")
        if not isinstance(mapping, dict):
            raise ConfigError(f"section {section} must be a mapping")
        for key, value in mapping.items():
            try:
                attr = _SECTION_KEYS[section][key]
            except KeyError:
                raise ConfigError(f"unknown key {section}.{key}") from None
            if attr in _TUPLE_FIELDS:
                value = tuple(value)
            kwargs[attr] = value
    return ScenarioConfig(**kwargs).validate()


def dump_config(cfg: ScenarioConfig, path) -> None:
    """Write a scenario back out as YAML, mirroring the load_config layout."""
    tree = {}
    for section, mapping in _SECTION_KEYS.items():
        tree[section] = {
            key: (list(v) if isinstance(v := getattr(cfg, attr), tuple) else v)
            for key, attr in mapping.items()
        }
    with open(path, "w") as fh:
        yaml.safe_dump(tree, fh, sort_keys=False)
