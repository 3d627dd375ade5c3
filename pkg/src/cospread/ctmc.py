"""Exact transient solution of the full chain on tiny multiplex networks.

Ground truth for the event-driven engine: enumerates every joint state of an
n-node network (12**n states, n <= 6), assembles the sparse generator from the
per-node rate laws, and integrates the forward equation.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp

from .contagion import Disease, Opinion, Transition, apply_transition
from .errors import IntegrationError

MAX_NODES = 6
N_LOCAL = 12  # joint (opinion, disease) states per node


def n_states(n_nodes):
    return N_LOCAL ** n_nodes


def pack_state(opinions, diseases):
    """Encode per-node (opinion, disease) into a single base-12 integer."""
    idx = 0
    for i in reversed(range(len(opinions))):
        idx = idx * N_LOCAL + int(opinions[i]) * 3 + int(diseases[i])
    return idx


def unpack_state(idx, n_nodes):
    ops = np.empty(n_nodes, dtype=np.int8)
    dis = np.empty(n_nodes, dtype=np.int8)
    for i in range(n_nodes):
        d = idx % N_LOCAL
        idx //= N_LOCAL
        ops[i] = d // 3
        dis[i] = d % 3
    return ops, dis


def _digits(n_nodes):
    """(S, n) array of per-node local states for every global state index."""
    S = n_states(n_nodes)
    idx = np.arange(S, dtype=np.int64)
    out = np.empty((S, n_nodes), dtype=np.int8)
    for i in range(n_nodes):
        out[:, i] = (idx // (N_LOCAL ** i)) % N_LOCAL
    return out


def build_generator(network, params):
    """Sparse rate matrix over the joint state space (diagonal = -row sum)."""
    n = network.n_nodes
    if n > MAX_NODES:
        raise ValueError(f"state space capacity exceeded: n={n} > {MAX_NODES}")
    local = _digits(n)
    ops = local // 3
    dis = local % 3
    S = local.shape[0]
    idx = np.arange(S, dtype=np.int64)

    rows, cols, vals = [], [], []
    for i in range(n):
        info_nb = network.info.neighbors(i)
        phy_nb = network.phy.neighbors(i)
        n_p = (ops[:, info_nb] == Opinion.P).sum(axis=1) if len(info_nb) else 0
        n_a = (ops[:, info_nb] == Opinion.A).sum(axis=1) if len(info_nb) else 0
        n_i = (dis[:, phy_nb] == Disease.I).sum(axis=1) if len(phy_nb) else 0
        mult = np.ones(S)
        mult[ops[:, i] == Opinion.P] = params.alpha_pro
        mult[ops[:, i] == Opinion.A] = params.alpha_anti

        is_u = ops[:, i] == Opinion.U
        for kind, rate_vec in (
            (Transition.U2P, is_u * params.beta_pro * n_p),
            (Transition.U2A, is_u * params.beta_anti * n_a),
            (Transition.P2R, (ops[:, i] == Opinion.P) * params.gamma_pro),
            (Transition.A2R, (ops[:, i] == Opinion.A) * params.gamma_anti),
            (Transition.R2U, (ops[:, i] == Opinion.R) * params.tau),
            (Transition.S2I, (dis[:, i] == Disease.S) * mult * params.beta_phy * n_i),
            (Transition.I2R, (dis[:, i] == Disease.I) * params.gamma_phy),
        ):
            rate_vec = np.asarray(rate_vec, dtype=float)
            if not np.any(rate_vec > 0):
                continue
            new_op, new_dis = apply_transition(kind, 0, 0)
            if kind in (Transition.S2I, Transition.I2R):
                # opinion digit unchanged; local state shifts by disease delta
                new_local_vec = local[:, i] - dis[:, i] + int(new_dis)
            else:
                new_local_vec = int(new_op) * 3 + dis[:, i]
            nz = rate_vec > 0
            tgt = idx[nz] + (new_local_vec[nz].astype(np.int64) - local[nz, i]) * (N_LOCAL ** i)
            rows.append(idx[nz])
            cols.append(tgt)
            vals.append(rate_vec[nz])

    if rows:
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
    else:
        rows = cols = np.empty(0, dtype=np.int64)
        vals = np.empty(0)
    Q = sparse.coo_matrix((vals, (rows, cols)), shape=(S, S)).tocsr()
    diag = -np.asarray(Q.sum(axis=1)).ravel()
    Q = Q + sparse.diags(diag)
    return Q.tocsr()


def transient_distribution(Q, p0, t, rtol=1e-10, atol=1e-13):
    """Distribution at time t from the forward equation p' = p Q."""
    p0 = np.asarray(p0, dtype=float)
    if abs(p0.sum() - 1.0) > 1e-9:
        raise ValueError("initial distribution must sum to 1")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return p0.copy()
    QT = Q.T.tocsr()
    sol = solve_ivp(lambda _t, p: QT @ p, (0.0, t), p0,
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"forward-equation integration failed: {sol.message}",
                               t=float(sol.t[-1]))
    return sol.y[:, -1]


def compartment_marginals(p, n_nodes):
    """(n_nodes, 12) array: probability node i occupies each joint compartment."""
    local = _digits(n_nodes)
    out = np.zeros((n_nodes, N_LOCAL))
    for i in range(n_nodes):
        for c in range(N_LOCAL):
            out[i, c] = p[local[:, i] == c].sum()
    return out


def expected_compartment_fractions(p, n_nodes):
    """(12,) expected fraction of nodes per joint compartment."""
    return compartment_marginals(p, n_nodes).mean(axis=0)


def compartment_count_moments(p, n_nodes, compartment):
    """Exact mean and variance of the number of nodes in one compartment."""
    local = _digits(n_nodes)
    counts = (local == compartment).sum(axis=1)
    mean = float((counts * p).sum())
    var = float((counts.astype(float) ** 2 * p).sum() - mean ** 2)
    return mean, var
