"""Event-driven simulation core (numba-compiled).

One exact continuous-time sample path per call: exponential waiting time with
the total rate, event chosen proportionally to its rate. Per-node aggregated
rates live in a flat table with bin partial sums (composition search); only
the firing node and its affected neighbors are recomputed per event, and the
partial sums are rebuilt periodically to shed floating-point drift.

State coding matches :mod:`cospread.contagion`: opinions U,P,A,R = 0..3,
diseases S,I,R = 0..2, joint compartment = opinion * 3 + disease, event kinds
U2P,U2A,P2R,A2R,R2U,S2I,I2R = 0..6.
"""

import numpy as np
from numba import njit

_BIN = 64
_REBUILD_MASK = (1 << 17) - 1


@njit(cache=True, nogil=True)
def _node_rate(i, op, dis, n_p, n_a, n_i,
               beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
               beta_phy, gamma_phy, alpha_pro, alpha_anti):
    r = 0.0
    o = op[i]
    if o == 0:
        r += beta_pro * n_p[i] + beta_anti * n_a[i]
    elif o == 1:
        r += gamma_pro
    elif o == 2:
        r += gamma_anti
    else:
        r += tau
    d = dis[i]
    if d == 0:
        if o == 1:
            mult = alpha_pro
        elif o == 2:
            mult = alpha_anti
        else:
            mult = 1.0
        r += mult * beta_phy * n_i[i]
    elif d == 1:
        r += gamma_phy
    return r


@njit(cache=True, nogil=True)
def run_sim(info_indptr, info_indices, phy_indptr, phy_indices,
            op0, dis0,
            beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
            beta_phy, gamma_phy, alpha_pro, alpha_anti,
            t_max, sample_dt, stop_at_extinction, rng):
    n = op0.shape[0]
    op = op0.copy()
    dis = dis0.copy()

    # neighbor-state counts
    n_p = np.zeros(n, dtype=np.int32)
    n_a = np.zeros(n, dtype=np.int32)
    n_i = np.zeros(n, dtype=np.int32)
    for i in range(n):
        for jj in range(info_indptr[i], info_indptr[i + 1]):
            j = info_indices[jj]
            if op[j] == 1:
                n_p[i] += 1
            elif op[j] == 2:
                n_a[i] += 1
        for jj in range(phy_indptr[i], phy_indptr[i + 1]):
            j = phy_indices[jj]
            if dis[j] == 1:
                n_i[i] += 1

    # per-node aggregated rates, bin partial sums, total
    r = np.zeros(n, dtype=np.float64)
    for i in range(n):
        r[i] = _node_rate(i, op, dis, n_p, n_a, n_i,
                          beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
                          beta_phy, gamma_phy, alpha_pro, alpha_anti)
    nbins = (n + _BIN - 1) // _BIN
    binsum = np.zeros(nbins, dtype=np.float64)
    for i in range(n):
        binsum[i // _BIN] += r[i]
    total = 0.0
    for b in range(nbins):
        total += binsum[b]

    # compartment counts and the sampling grid
    counts = np.zeros(12, dtype=np.int64)
    n_inf = 0
    for i in range(n):
        counts[op[i] * 3 + dis[i]] += 1
        if dis[i] == 1:
            n_inf += 1
    n_grid = int(np.floor(t_max / sample_dt + 1e-9)) + 1
    grid = np.empty((n_grid, 12), dtype=np.int64)
    grid[0] = counts
    g = 1

    # event storage (grown by doubling)
    cap = 8192
    ev_t = np.empty(cap, dtype=np.float64)
    ev_node = np.empty(cap, dtype=np.int32)
    ev_kind = np.empty(cap, dtype=np.int8)
    n_ev = 0

    # per-node infection and opinion-history records
    inf_time = np.full(n, -1.0, dtype=np.float64)
    op_at_inf = np.full(n, -1, dtype=np.int8)
    spells_before_inf = np.full(n, -1, dtype=np.int32)
    spells = np.zeros(n, dtype=np.int32)  # opinion-holding spells begun so far
    held_pro = np.zeros(n, dtype=np.uint8)
    held_anti = np.zeros(n, dtype=np.uint8)
    for i in range(n):
        if op[i] == 1:
            spells[i] = 1
            held_pro[i] = 1
        elif op[i] == 2:
            spells[i] = 1
            held_anti[i] = 1
        if dis[i] == 1:
            inf_time[i] = 0.0
            op_at_inf[i] = op[i]
            spells_before_inf[i] = spells[i]

    t = 0.0
    while True:
        if stop_at_extinction and n_inf == 0:
            break
        if total <= 1e-300:
            break
        t_next = t + rng.exponential(1.0 / total)
        if t_next >= t_max:
            t = t_max
            break
        t = t_next

        # composition search: bin, then node within the bin
        u = rng.random() * total
        acc = 0.0
        b = nbins - 1
        for bi in range(nbins):
            if acc + binsum[bi] > u:
                b = bi
                break
            acc += binsum[bi]
        i = -1
        lo = b * _BIN
        hi = min(lo + _BIN, n)
        for j in range(lo, hi):
            if acc + r[j] > u:
                i = j
                break
            acc += r[j]
        if i < 0:  # drift overshoot: fall back to the last active node in the bin
            for j in range(hi - 1, lo - 1, -1):
                if r[j] > 0.0:
                    i = j
                    break
        if i < 0:
            # the partial sums went stale; select the largest-rate node
            # directly (keeps the committed event time) and rebuild
            bestr = 0.0
            for j in range(n):
                if r[j] > bestr:
                    bestr = r[j]
                    i = j
            total = 0.0
            for bi in range(nbins):
                s = 0.0
                base = bi * _BIN
                top = min(base + _BIN, n)
                for j in range(base, top):
                    s += r[j]
                binsum[bi] = s
                total += s
            if i < 0:
                break  # no enabled events anywhere

        # pick the transition within the node (documented fixed order)
        u2 = rng.random() * r[i]
        kind = -1
        o = op[i]
        d = dis[i]
        acc2 = 0.0
        if o == 0:
            e = beta_pro * n_p[i]
            if u2 < acc2 + e:
                kind = 0
            else:
                acc2 += e
                e = beta_anti * n_a[i]
                if u2 < acc2 + e:
                    kind = 1
                else:
                    acc2 += e
        elif o == 1:
            if u2 < acc2 + gamma_pro:
                kind = 2
            else:
                acc2 += gamma_pro
        elif o == 2:
            if u2 < acc2 + gamma_anti:
                kind = 3
            else:
                acc2 += gamma_anti
        else:
            if u2 < acc2 + tau:
                kind = 4
            else:
                acc2 += tau
        if kind < 0:
            # the selection draw fell past the opinion block, so this is the
            # node's single disease event; guard zero-rate corners (fp slack)
            if d == 0 and n_i[i] > 0:
                kind = 5
            elif d == 1:
                kind = 6
            elif o == 0:
                kind = 1 if n_a[i] > 0 else 0
            elif o == 1:
                kind = 2
            elif o == 2:
                kind = 3
            else:
                kind = 4

        # record pre-event state on all grid points strictly before t
        while g < n_grid and g * sample_dt < t:
            grid[g] = counts
            g += 1

        # apply the event
        if kind == 0:  # U -> P
            counts[0 * 3 + d] -= 1
            counts[1 * 3 + d] += 1
            op[i] = 1
            spells[i] += 1
            held_pro[i] = 1
            for jj in range(info_indptr[i], info_indptr[i + 1]):
                j = info_indices[jj]
                n_p[j] += 1
                if op[j] == 0:
                    new = _node_rate(j, op, dis, n_p, n_a, n_i,
                                     beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
                                     beta_phy, gamma_phy, alpha_pro, alpha_anti)
                    delta = new - r[j]
                    r[j] = new
                    binsum[j // _BIN] += delta
                    total += delta
        elif kind == 1:  # U -> A
            counts[0 * 3 + d] -= 1
            counts[2 * 3 + d] += 1
            op[i] = 2
            spells[i] += 1
            held_anti[i] = 1
            for jj in range(info_indptr[i], info_indptr[i + 1]):
                j = info_indices[jj]
                n_a[j] += 1
                if op[j] == 0:
                    new = _node_rate(j, op, dis, n_p, n_a, n_i,
                                     beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
                                     beta_phy, gamma_phy, alpha_pro, alpha_anti)
                    delta = new - r[j]
                    r[j] = new
                    binsum[j // _BIN] += delta
                    total += delta
        elif kind == 2 or kind == 3:  # P -> R or A -> R
            was_p = kind == 2
            counts[(1 if was_p else 2) * 3 + d] -= 1
            counts[3 * 3 + d] += 1
            op[i] = 3
            for jj in range(info_indptr[i], info_indptr[i + 1]):
                j = info_indices[jj]
                if was_p:
                    n_p[j] -= 1
                else:
                    n_a[j] -= 1
                if op[j] == 0:
                    new = _node_rate(j, op, dis, n_p, n_a, n_i,
                                     beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
                                     beta_phy, gamma_phy, alpha_pro, alpha_anti)
                    delta = new - r[j]
                    r[j] = new
                    binsum[j // _BIN] += delta
                    total += delta
        elif kind == 4:  # R -> U
            counts[3 * 3 + d] -= 1
            counts[0 * 3 + d] += 1
            op[i] = 0
        elif kind == 5:  # S -> I
            counts[o * 3 + 0] -= 1
            counts[o * 3 + 1] += 1
            dis[i] = 1
            n_inf += 1
            inf_time[i] = t
            op_at_inf[i] = o
            spells_before_inf[i] = spells[i]
            for jj in range(phy_indptr[i], phy_indptr[i + 1]):
                j = phy_indices[jj]
                n_i[j] += 1
                if dis[j] == 0:
                    new = _node_rate(j, op, dis, n_p, n_a, n_i,
                                     beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
                                     beta_phy, gamma_phy, alpha_pro, alpha_anti)
                    delta = new - r[j]
                    r[j] = new
                    binsum[j // _BIN] += delta
                    total += delta
        else:  # I -> R
            counts[o * 3 + 1] -= 1
            counts[o * 3 + 2] += 1
            dis[i] = 2
            n_inf -= 1
            for jj in range(phy_indptr[i], phy_indptr[i + 1]):
                j = phy_indices[jj]
                n_i[j] -= 1
                if dis[j] == 0:
                    new = _node_rate(j, op, dis, n_p, n_a, n_i,
                                     beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
                                     beta_phy, gamma_phy, alpha_pro, alpha_anti)
                    delta = new - r[j]
                    r[j] = new
                    binsum[j // _BIN] += delta
                    total += delta

        # the firing node's own rate
        new = _node_rate(i, op, dis, n_p, n_a, n_i,
                         beta_pro, beta_anti, gamma_pro, gamma_anti, tau,
                         beta_phy, gamma_phy, alpha_pro, alpha_anti)
        delta = new - r[i]
        r[i] = new
        binsum[i // _BIN] += delta
        total += delta

        # log the event
        if n_ev == cap:
            cap *= 2
            new_t = np.empty(cap, dtype=np.float64)
            new_node = np.empty(cap, dtype=np.int32)
            new_kind = np.empty(cap, dtype=np.int8)
            new_t[:n_ev] = ev_t
            new_node[:n_ev] = ev_node
            new_kind[:n_ev] = ev_kind
            ev_t, ev_node, ev_kind = new_t, new_node, new_kind
        ev_t[n_ev] = t
        ev_node[n_ev] = i
        ev_kind[n_ev] = kind
        n_ev += 1

        if n_ev & _REBUILD_MASK == 0:
            total = 0.0
            for bi in range(nbins):
                s = 0.0
                base = bi * _BIN
                top = min(base + _BIN, n)
                for j in range(base, top):
                    s += r[j]
                binsum[bi] = s
                total += s

    # carry the final state onto the remaining grid points
    while g < n_grid:
        grid[g] = counts
        g += 1

    return (grid, ev_t[:n_ev], ev_node[:n_ev], ev_kind[:n_ev],
            inf_time, op_at_inf, spells_before_inf, spells, held_pro, held_anti,
            t, n_inf == 0)
