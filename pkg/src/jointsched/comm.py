"""RB-level uplink model: rates, eligibility, features, schedule decoders.

The batch decoders dispatch to compiled kernels; the per-RB helper functions
here define the same quantities one step at a time and are what the tests
and the independent validator reason about.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .instance import Instance, RadioParams

__all__ = [
    "CommSchedule",
    "spectral_efficiency",
    "rb_rate",
    "eligible_set",
    "comm_feature_matrix",
    "comm_features",
    "decode_comm_policy",
    "decode_comm_greedy_payload",
]

COMM_FEATURE_NAMES = (
    "remaining_payload",
    "sinr_linear",
    "rate",
    "branch_length",
    "group_unfinished",
    "group_finished",
    "slot_index",
    "inverse_rate",
)


def spectral_efficiency(gamma_db: float, radio: RadioParams) -> float:
    """Clipped Shannon spectral efficiency in bit/s/Hz; 0 below the threshold."""
    if gamma_db < radio.sinr_threshold_db:
        return 0.0
    lin = 10.0 ** (gamma_db / 10.0)
    return min(math.log2(1.0 + lin / radio.shannon_gap), radio.eta_max)


def rb_rate(gamma_db: float, radio: RadioParams) -> float:
    """Achievable rate of one RB in bit/s."""
    return radio.rb_bandwidth_hz * spectral_efficiency(gamma_db, radio)


@dataclass
class CommSchedule:
    """RB grants plus per-stream completion state.

    grants: list of (stream, slot, subcarrier) with 0-based slot/subcarrier
    indices, in RB scan order. completion_slots[k] is the 1-based slot count
    at which stream k drained, or None if the horizon ran out.
    """

    grants: list
    completion_slots: list
    slot_s: float

    @property
    def finished(self) -> bool:
        return all(t is not None for t in self.completion_slots)

    def completion_times(self) -> list:
        """Per-stream completion time in seconds (None while unfinished)."""
        return [None if t is None else t * self.slot_s for t in self.completion_slots]

    def grant_map(self) -> dict:
        """(slot, subcarrier) -> stream for every granted RB."""
        return {(t, f): k for k, t, f in self.grants}

    def write_csv(self, path, inst: Instance) -> None:
        """Grant rows (k, t, f, rate_bps) followed by a per-stream summary file-in-one."""
        rates = inst.rates_bps()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "t", "f", "rate_bps"])
            for k, t, f in self.grants:
                w.writerow([k, t, f, repr(rates[k, t, f])])

    def write_summary_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "tau_slots", "tau_ms"])
            for k, tau in enumerate(self.completion_slots):
                if tau is None:
                    w.writerow([k, "unfinished", ""])
                else:
                    w.writerow([k, tau, repr(tau * self.slot_s * 1e3)])


def eligible_set(t: int, f: int, residual, inst: Instance) -> list:
    """Streams with unfinished payload and feasible SINR on RB (t, f)."""
    th = inst.radio.sinr_threshold_db
    return [
        k
        for k in range(inst.num_streams)
        if residual[k] > 0.0 and inst.trace_db[k, t, f] >= th
    ]

def comm_feature_matrix(t: int, f: int, residual, finished_mask, inst: Instance):
    """Normalized feature rows for the eligible set at RB (t, f).

    Returns (eligible stream list, matrix of shape (len(eligible), 8)).
    Raw features follow COMM_FEATURE_NAMES; each column is min-max scaled
    over the eligible set, degenerate columns mapping to 0.
    """
    elig = eligible_set(t, f, residual, inst)
    if not elig:
        return elig, np.zeros((0, 8))
    lin = inst.sinr_linear()
    rates = inst.rates_bps()
    groups = inst.group_ids()
    rmax = inst.radio.rb_bandwidth_hz * inst.radio.eta_max
    raw = np.empty((len(elig), 8))
    for row, k in enumerate(elig):
        g = groups[k]
        same = [j for j in range(inst.num_streams) if groups[j] == g]
        n_fin = sum(1 for j in same if finished_mask[j])
        raw[row] = (
            residual[k],
            lin[k, t, f],
            rates[k, t, f],
            inst.streams[k].branch_length,
            len(same) - n_fin,
            n_fin,
            t + 1,
            rmax / rates[k, t, f],
        )
    lo = raw.min(axis=0)
    hi = raw.max(axis=0)
    span = hi - lo
    out = np.zeros_like(raw)
    ok = span > 0
    out[:, ok] = (raw[:, ok] - lo[ok]) / span[ok]
    return elig, out


def comm_features(k: int, t: int, f: int, residual, finished_mask, inst: Instance):
    """Normalized 8-feature vector of eligible stream k at RB (t, f)."""
    elig, mat = comm_feature_matrix(t, f, residual, finished_mask, inst)
    if k not in elig:
        raise ValueError(f"stream {k} is not eligible at RB ({t},{f})")
    return mat[elig.index(k)]


def _decode(inst: Instance, alpha, use_policy: bool) -> CommSchedule:
    rmax = inst.radio.rb_bandwidth_hz * inst.radio.eta_max
    grant, tau = _kernels.comm_decode(
        inst.rates_bps(),
        inst.sinr_linear(),
        inst.payload_bits(),
        inst.group_ids(),
        inst.dag.num_groups,
        inst.branch_lengths().astype(np.float64),
        np.asarray(alpha, dtype=np.float64),
        inst.radio.slot_s,
        rmax,
        use_policy,
    )
    F = inst.radio.num_subcarriers
    grants = [
        (int(k), i // F, i % F) for i, k in enumerate(grant) if k >= 0
    ]
    completion = [None if v < 0 else int(v) for v in tau]
    return CommSchedule(grants=grants, completion_slots=completion, slot_s=inst.radio.slot_s)


def decode_comm_policy(inst: Instance, alpha) -> CommSchedule:
    """Decode the policy-scored upload schedule for the 8 comm weights."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (8,) or not np.isfinite(alpha).all():
        raise ValueError("alpha must be 8 finite weights")
    return _decode(inst, alpha, True)


def decode_comm_greedy_payload(inst: Instance) -> CommSchedule:
    """Largest-remaining-payload greedy upload schedule."""
    return _decode(inst, np.zeros(8), False)
