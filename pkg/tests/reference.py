"""Straightforward pure-Python reference decoders used to cross-check the
compiled kernels. Deliberately written against the public helper functions
(eligible_set, comm_feature_matrix, candidate_start_finish, ...) with no
shortcuts, so disagreements localize bugs in the fast path."""

import numpy as np

from jointsched import CommSchedule
from jointsched.comm import comm_feature_matrix, eligible_set
from jointsched.dagsched import (
    ExecutionSchedule,
    ReleaseMap,
    bottom_levels,
    candidate_start_finish,
    dag_feature_matrix,
)


def reference_comm(inst, alpha=None):
    """RB-by-RB decode; alpha=None applies the payload-greedy rule."""
    K = inst.num_streams
    rates = inst.rates_bps()
    dt = inst.radio.slot_s
    residual = list(inst.payload_bits())
    finished = [False] * K
    tau = [None] * K
    grants = []
    for t in range(inst.radio.horizon_slots):
        if all(finished):
            break
        for f in range(inst.radio.num_subcarriers):
            elig = eligible_set(t, f, residual, inst)
            if not elig:
                continue
            if alpha is None:
                best = max(elig, key=lambda k: (residual[k], -k))
            else:
                _, feats = comm_feature_matrix(t, f, residual, finished, inst)
                scores = feats @ np.asarray(alpha)
                best = elig[int(np.argmax(scores))]  # argmax keeps lowest index on ties
            grants.append((best, t, f))
            residual[best] = max(0.0, residual[best] - rates[best, t, f] * dt)
            if residual[best] == 0.0:
                finished[best] = True
                tau[best] = t + 1
    return CommSchedule(grants=grants, completion_slots=tau, slot_s=dt)


def reference_dag(inst, releases: ReleaseMap, beta=None, mu=None):
    """List scheduling; beta=None applies the bottom-level greedy rule."""
    dag = inst.dag
    n = dag.num_nodes
    bl = bottom_levels(dag)
    partial = ExecutionSchedule(
        core=np.full(n, -1), start=np.zeros(n), finish=np.zeros(n)
    )
    core_avail = np.zeros(inst.num_cores)
    done = set()
    for _ in range(n):
        ready = [
            v for v in range(n) if v not in done and all(u in done for u in dag.preds[v])
        ]
        if beta is None:
            v = max(ready, key=lambda v: (bl[v], -v))
        else:
            feats = dag_feature_matrix(ready, releases, core_avail, inst)
            v = ready[int(np.argmax(feats @ np.asarray(beta)))]
        best = None
        for c in range(inst.num_cores):
            s, fin = candidate_start_finish(v, c, core_avail, partial, releases, inst)
            if mu is None:
                score = fin
            else:
                k_same = sum(1 for u in dag.preds[v] if int(partial.core[u]) == c)
                k_cross = len(dag.preds[v]) - k_same
                d_off = sum(
                    dag.nodes[u].off_write_s + dag.nodes[v].off_read_s
                    for u in dag.preds[v]
                    if int(partial.core[u]) != c
                )
                score = (
                    fin
                    + mu[0] * k_cross
                    + mu[1] * d_off
                    - mu[2] * k_same
                    + mu[3] * core_avail[c]
                )
            if best is None or score < best[0]:
                best = (score, c, s, fin)
        _, c, s, fin = best
        partial.core[v] = c
        partial.start[v] = s
        partial.finish[v] = fin
        core_avail[c] = fin
        done.add(v)
    return partial
