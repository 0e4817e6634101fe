"""Joint OFDMA upload and release-aware DAG scheduling toolkit."""

from .comm import (
    CommSchedule,
    decode_comm_greedy_payload,
    decode_comm_policy,
    rb_rate,
    spectral_efficiency,
)
from .config import ConfigError, ScenarioConfig, default_config, dump_config, load_config
from .dagsched import (
    ExecutionSchedule,
    InfeasibleUploadError,
    ReleaseMap,
    barrier_releases,
    bottom_levels,
    propagate_releases,
    schedule_dag_greedy,
    schedule_dag_policy,
)
from .ga import GaParams, GaTrace, evolve
from .instance import Instance, InstanceError, generate_instance, load_instance, save_instance
from .objective import FitnessReport, fitness, sync_penalty
from .oracle import OracleLimitError, OracleLimits, brute_force_optimum
from .rng import generator, substream_seed
from .schemes import (
    SCHEME_IDS,
    SchemeResult,
    run_scheme,
    scheme_result_to_canonical_json,
    scheme_result_to_dict,
)
from .validate import ValidationError, validate_comm, validate_exec, validate_result

__all__ = [
    "CommSchedule",
    "ConfigError",
    "ExecutionSchedule",
    "FitnessReport",
    "GaParams",
    "GaTrace",
    "InfeasibleUploadError",
    "Instance",
    "InstanceError",
    "OracleLimitError",
    "OracleLimits",
    "ReleaseMap",
    "SCHEME_IDS",
    "ScenarioConfig",
    "SchemeResult",
    "ValidationError",
    "barrier_releases",
    "bottom_levels",
    "brute_force_optimum",
    "decode_comm_greedy_payload",
    "decode_comm_policy",
    "default_config",
    "dump_config",
    "evolve",
    "fitness",
    "generate_instance",
    "generator",
    "load_config",
    "load_instance",
    "propagate_releases",
    "rb_rate",
    "run_scheme",
    "save_instance",
    "schedule_dag_greedy",
    "schedule_dag_policy",
    "scheme_result_to_canonical_json",
    "scheme_result_to_dict",
    "spectral_efficiency",
    "substream_seed",
    "sync_penalty",
    "validate_comm",
    "validate_exec",
    "validate_result",
]

__version__ = "0.1.0"
