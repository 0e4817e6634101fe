"""Shared fixtures: default scenario, tiny oracle-scale scenario, and a
session-scoped batch of full-budget scheme runs on 20 seeded default
instances (reused by the statistical acceptance criteria)."""

import time

import pytest

from jointsched import GaParams, default_config, generate_instance, run_scheme, substream_seed
from jointsched.schemes import SCHEME_IDS

BATCH_SEEDS = list(range(20))
# Full search budget: population 40 and generations 0..35 inclusive.
FULL_GA = dict(population=40, generations=36, stall_limit=None)


def make_instance(cfg, seed):
    return generate_instance(cfg, substream_seed(seed, "instance"))


def ga_for(seed, scheme, **overrides):
    kw = dict(FULL_GA, **overrides)
    return GaParams(seed=substream_seed(seed, "ga", scheme), **kw)


@pytest.fixture(scope="session")
def default_cfg():
    return default_config()


@pytest.fixture(scope="session")
def default_inst(default_cfg):
    return make_instance(default_cfg, 0)


@pytest.fixture(scope="session")
def tiny_cfg(default_cfg):
    """Within OracleLimits: K=2, T=6, F=1, 6 DAG nodes, C=2."""
    return default_cfg.with_overrides(
        num_subcarriers=1,
        horizon_slots=6,
        payloads_kb=[0.1, 0.15],
        groups=[[0, 1]],
        branch_lengths=[1, 1],
        head_len=3,
        cores=2,
        sinr_range_db=(8.0, 20.0),
        p_range_ms=(1.0, 4.0),
        on_chip_range_ms=(0.1, 0.4),
        off_chip_range_ms=(1.0, 3.0),
    )


class Batch:
    """Runs per seed plus the wall time spent building them."""

    def __init__(self, runs, elapsed_s):
        self.runs = runs  # {seed: (instance, {scheme: SchemeResult})}
        self.elapsed_s = elapsed_s


@pytest.fixture(scope="session")
def sv_batch(default_cfg):
    """Full-budget runs of all five schemes on 20 seeded default instances."""
    t0 = time.perf_counter()
    runs = {}
    for seed in BATCH_SEEDS:
        inst = make_instance(default_cfg, seed)
        results = {
            scheme: run_scheme(scheme, inst, ga_for(seed, scheme)) for scheme in SCHEME_IDS
        }
        runs[seed] = (inst, results)
    return Batch(runs, time.perf_counter() - t0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance-criterion verdict lines after the test summary."""
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
