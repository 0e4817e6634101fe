"""Numba kernels for the hot decoding loops.

These implement the RB-by-RB communication decoder, the release-aware list
scheduler, and the joint-greedy rollout baseline over flat arrays. The
Python modules wrap them with the documented data types; tests cross-check
them against straightforward pure-Python reference implementations.

Conventions shared by all kernels:
- RB scan order: subcarriers ascending within a slot, slots ascending.
- All argmax/argmin tie-breaks resolve to the lowest index (strict compare).
- tau[k] is a 1-based completion slot count, -1 while unfinished.
- Feature vectors are min-max normalized over the current candidate set;
  a degenerate feature (min == max) normalizes to 0.
"""

from __future__ import annotations

import numpy as np
from numba import njit

N_COMM_FEATURES = 8
N_DAG_FEATURES = 8


@njit(cache=True)
def comm_decode(rates, lin, payload, group, num_groups, branch_len, alpha, dt, rmax, use_policy):
    """Decode a communication schedule by scanning RBs in order.

    use_policy=True scores eligible streams with the weighted normalized
    feature vector; False applies the largest-remaining-payload greedy rule.
    Returns (grant, tau): grant[t*F+f] is the granted stream or -1,
    tau[k] the 1-based completion slot or -1 if the horizon ran out.
    """
    K, T, F = rates.shape
    Q = payload.copy()
    tau = np.full(K, -1, dtype=np.int64)
    grant = np.full(T * F, -1, dtype=np.int64)
    unfinished = np.zeros(num_groups, dtype=np.int64)
    gsize = np.zeros(num_groups, dtype=np.int64)
    for k in range(K):
        unfinished[group[k]] += 1
        gsize[group[k]] += 1
    n_active = K
    z = np.empty((K, N_COMM_FEATURES))
    lo = np.empty(N_COMM_FEATURES)
    hi = np.empty(N_COMM_FEATURES)
    for t in range(T):
        if n_active == 0:
            break
        for f in range(F):
            best = -1
            if use_policy:
                n_elig = 0
                for k in range(K):
                    if Q[k] > 0.0 and rates[k, t, f] > 0.0:
                        z[k, 0] = Q[k]
                        z[k, 1] = lin[k, t, f]
                        z[k, 2] = rates[k, t, f]
                        z[k, 3] = branch_len[k]
                        z[k, 4] = unfinished[group[k]]
                        z[k, 5] = gsize[group[k]] - unfinished[group[k]]
                        z[k, 6] = t + 1
                        z[k, 7] = rmax / rates[k, t, f]
                        n_elig += 1
                if n_elig == 0:
                    continue
                for i in range(N_COMM_FEATURES):
                    lo[i] = np.inf
                    hi[i] = -np.inf
                for k in range(K):
                    if Q[k] > 0.0 and rates[k, t, f] > 0.0:
                        for i in range(N_COMM_FEATURES):
                            if z[k, i] < lo[i]:
                                lo[i] = z[k, i]
                            if z[k, i] > hi[i]:
                                hi[i] = z[k, i]
                best_score = -np.inf
                for k in range(K):
                    if Q[k] > 0.0 and rates[k, t, f] > 0.0:
                        score = 0.0
                        for i in range(N_COMM_FEATURES):
                            span = hi[i] - lo[i]
                            if span > 0.0:
                                score += alpha[i] * (z[k, i] - lo[i]) / span
                        if score > best_score:
                            best_score = score
                            best = k
            else:
                best_q = -np.inf
                for k in range(K):
                    if Q[k] > 0.0 and rates[k, t, f] > 0.0 and Q[k] > best_q:
                        best_q = Q[k]
                        best = k
            if best < 0:
                continue
            grant[t * F + f] = best
            Q[best] = max(0.0, Q[best] - rates[best, t, f] * dt)
            if Q[best] == 0.0:
                tau[best] = t + 1
                unfinished[group[best]] -= 1
                n_active -= 1
    return grant, tau


@njit(cache=True)
def _greedy_rollout(rates, Q, tau, unfinished, group, n_active, t0, f0, dt):
    """Complete a partial upload state with the payload-greedy rule, in place.

    Scanning starts at RB (t0, f0). Returns the remaining active count.
    """
    K, T, F = rates.shape
    for t in range(t0, T):
        if n_active == 0:
            break
        f_start = f0 if t == t0 else 0
        for f in range(f_start, F):
            best = -1
            best_q = -np.inf
            for k in range(K):
                if Q[k] > 0.0 and rates[k, t, f] > 0.0 and Q[k] > best_q:
                    best_q = Q[k]
                    best = k
            if best < 0:
                continue
            Q[best] = max(0.0, Q[best] - rates[best, t, f] * dt)
            if Q[best] == 0.0:
                tau[best] = t + 1
                unfinished[group[best]] -= 1
                n_active -= 1
    return n_active


@njit(cache=True)
def dag_schedule(
    pred_ptr,
    pred_idx,
    succ_ptr,
    succ_idx,
    p,
    w_on,
    r_on,
    w_off,
    r_off,
    has_rel,
    rel,
    bottom,
    chain_ind,
    cross_ind,
    num_cores,
    beta,
    mu,
    use_policy,
):
    """Release-aware list scheduling on homogeneous cores (append-only timelines).

    use_policy=True ranks ready nodes by the weighted normalized feature
    vector and cores by the mapping score; False uses bottom level descending
    and earliest finish time. Returns (core, start, finish) per node.
    """
    N = len(p)
    core = np.full(N, -1, dtype=np.int64)
    start = np.zeros(N)
    finish = np.zeros(N)
    chi = np.zeros(num_cores)
    unsched_preds = np.empty(N, dtype=np.int64)
    for v in range(N):
        unsched_preds[v] = pred_ptr[v + 1] - pred_ptr[v]
    scheduled = np.zeros(N, dtype=np.bool_)
    q = np.empty((N, N_DAG_FEATURES))
    lo = np.empty(N_DAG_FEATURES)
    hi = np.empty(N_DAG_FEATURES)
    for _ in range(N):
        # ready set and node choice
        v_star = -1
        if use_policy:
            mean_chi = 0.0
            for c in range(num_cores):
                mean_chi += chi[c]
            mean_chi /= num_cores
            n_ready = 0
            for v in range(N):
                if not scheduled[v] and unsched_preds[v] == 0:
                    q[v, 0] = bottom[v]
                    q[v, 1] = p[v]
                    q[v, 2] = succ_ptr[v + 1] - succ_ptr[v]
                    q[v, 3] = -(pred_ptr[v + 1] - pred_ptr[v])
                    q[v, 4] = chain_ind[v]
                    q[v, 5] = cross_ind[v]
                    q[v, 6] = -rel[v] if has_rel[v] else 0.0
                    q[v, 7] = -mean_chi
                    n_ready += 1
            for i in range(N_DAG_FEATURES):
                lo[i] = np.inf
                hi[i] = -np.inf
            for v in range(N):
                if not scheduled[v] and unsched_preds[v] == 0:
                    for i in range(N_DAG_FEATURES):
                        if q[v, i] < lo[i]:
                            lo[i] = q[v, i]
                        if q[v, i] > hi[i]:
                            hi[i] = q[v, i]
            best_score = -np.inf
            for v in range(N):
                if not scheduled[v] and unsched_preds[v] == 0:
                    score = 0.0
                    for i in range(N_DAG_FEATURES):
                        span = hi[i] - lo[i]
                        if span > 0.0:
                            score += beta[i] * (q[v, i] - lo[i]) / span
                    if score > best_score:
                        best_score = score
                        v_star = v
        else:
            best_bl = -np.inf
            for v in range(N):
                if not scheduled[v] and unsched_preds[v] == 0 and bottom[v] > best_bl:
                    best_bl = bottom[v]
                    v_star = v
        # core choice
        c_star = -1
        best_map = np.inf
        s_star = 0.0
        for c in range(num_cores):
            s_hat = chi[c]
            if has_rel[v_star] and rel[v_star] > s_hat:
                s_hat = rel[v_star]
            k_cross = 0
            k_same = 0
            d_off = 0.0
            for e in range(pred_ptr[v_star], pred_ptr[v_star + 1]):
                u = pred_idx[e]
                if core[u] == c:
                    k_same += 1
                    ready = finish[u] + w_on[u] + r_on[v_star]
                else:
                    k_cross += 1
                    d_off += w_off[u] + r_off[v_star]
                    ready = finish[u] + w_off[u] + r_off[v_star]
                if ready > s_hat:
                    s_hat = ready
            f_hat = s_hat + p[v_star]
            if use_policy:
                map_score = f_hat + mu[0] * k_cross + mu[1] * d_off - mu[2] * k_same + mu[3] * chi[c]
            else:
                map_score = f_hat
            if map_score < best_map:
                best_map = map_score
                c_star = c
                s_star = s_hat
        core[v_star] = c_star
        start[v_star] = s_star
        finish[v_star] = s_star + p[v_star]
        chi[c_star] = finish[v_star]
        scheduled[v_star] = True
        for e in range(succ_ptr[v_star], succ_ptr[v_star + 1]):
            unsched_preds[succ_idx[e]] -= 1
    return core, start, finish


@njit(cache=True)
def _sync_penalty_from_tau(tau, group, num_groups, dt):
    big = np.full(num_groups, -np.inf)
    small = np.full(num_groups, np.inf)
    for k in range(len(tau)):
        tk = tau[k] * dt
        if tk > big[group[k]]:
            big[group[k]] = tk
        if tk < small[group[k]]:
            small[group[k]] = tk
    total = 0.0
    for m in range(num_groups):
        total += big[m] - small[m]
    return total


@njit(cache=True)
def joint_greedy_comm(
    rates,
    payload,
    group,
    num_groups,
    dt,
    lam,
    p_inv,
    entries,
    pred_ptr,
    pred_idx,
    succ_ptr,
    succ_idx,
    p,
    w_on,
    r_on,
    w_off,
    r_off,
    bottom,
    chain_ind,
    cross_ind,
    num_cores,
):
    """Myopic joint baseline: per RB, grant the eligible stream whose greedy
    completion rollout plus greedy DAG schedule yields the lowest projected
    objective. Returns (grant, tau) like comm_decode.
    """
    K, T, F = rates.shape
    N = len(p)
    Q = payload.copy()
    tau = np.full(K, -1, dtype=np.int64)
    grant = np.full(T * F, -1, dtype=np.int64)
    unfinished = np.zeros(num_groups, dtype=np.int64)
    for k in range(K):
        unfinished[group[k]] += 1
    n_active = K
    dummy_beta = np.zeros(N_DAG_FEATURES)
    dummy_mu = np.zeros(4)
    has_rel = np.zeros(N, dtype=np.bool_)
    for k in range(K):
        has_rel[entries[k]] = True
    rel = np.zeros(N)
    for t in range(T):
        if n_active == 0:
            break
        for f in range(F):
            if n_active == 0:
                break
            n_elig = 0
            only = -1
            for k in range(K):
                if Q[k] > 0.0 and rates[k, t, f] > 0.0:
                    n_elig += 1
                    only = k
            if n_elig == 0:
                continue
            if n_elig == 1:
                best = only
            else:
                best = -1
                best_j = np.inf
                for k in range(K):
                    if not (Q[k] > 0.0 and rates[k, t, f] > 0.0):
                        continue
                    # tentative grant of (t, f) to k, then greedy completion
                    Qp = Q.copy()
                    taup = tau.copy()
                    unfin = unfinished.copy()
                    act = n_active
                    Qp[k] = max(0.0, Qp[k] - rates[k, t, f] * dt)
                    if Qp[k] == 0.0:
                        taup[k] = t + 1
                        unfin[group[k]] -= 1
                        act -= 1
                    nf = f + 1
                    nt = t
                    if nf == F:
                        nf = 0
                        nt = t + 1
                    act = _greedy_rollout(rates, Qp, taup, unfin, group, act, nt, nf, dt)
                    if act > 0:
                        j = p_inv
                    else:
                        for i in range(K):
                            rel[entries[i]] = taup[i] * dt
                        _, _, fin = dag_schedule(
                            pred_ptr, pred_idx, succ_ptr, succ_idx,
                            p, w_on, r_on, w_off, r_off,
                            has_rel, rel, bottom, chain_ind, cross_ind,
                            num_cores, dummy_beta, dummy_mu, False,
                        )
                        t_e2e = 0.0
                        for v in range(N):
                            if fin[v] > t_e2e:
                                t_e2e = fin[v]
                        j = t_e2e + lam * _sync_penalty_from_tau(taup, group, num_groups, dt)
                    if j < best_j:
                        best_j = j
                        best = k
            grant[t * F + f] = best
            Q[best] = max(0.0, Q[best] - rates[best, t, f] * dt)
            if Q[best] == 0.0:
                tau[best] = t + 1
                unfinished[group[best]] -= 1
                n_active -= 1
    return grant, tau
