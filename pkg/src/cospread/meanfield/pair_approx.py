"""Degree-based pair approximation of the coupled dynamics on two layers.

Tracks expected densities of single nodes [Y_{k1}X_{k2}] (opinion Y, disease
X, info-degree k1, phy-degree k2) and of the dyad families whose dynamics
feed back into them:

* physical-layer dyads  Y_{k1}S_{k2} ~ I_l  and  Y_{k1}S_{k2} ~ S_l
  for every opinion Y (8 families),
* information-layer dyads  U_{k1}X_{k2} ~ A_l / P_l / U_l
  for every disease state X (9 families).

Dyads use the ordered convention (an undirected edge is counted once per
orientation), so summing a family over neighbor states and degrees gives
degree times the matching single. Triples are closed with pair products:
within one layer via (k-1)/k * [X~Y_k][Y_k~Z] / [Y_k], across layers via
[X~Y][Y~Z] / [Y]. The expected transmission rate of a susceptible neighbor
whose opinion is untracked is approximated by one of three schemes: the
global opinion mix, the opinion mix of same-degree susceptibles, or the
pair-closed neighborhood form.

Temporary opinion immunity (tau > 0) adds a flow from every tracked
R-opinion slot to the matching U slot; the dyad families with an R-opinion
endpoint in the untracked position have no tracked source, so this extension
is validated against simulation only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..contagion import COMPARTMENTS
from ..errors import ConfigurationError
from ..networks import InterLayerCoupling, MixingMatrix
from .integrate import integrate

EPS = 1e-12  # densities below this are treated as unoccupied in closures

#: disease mass below which the outbreak is considered over
EXTINCTION_THRESHOLD = 1e-7


class BetaHatScheme(str, Enum):
    MIXED = "mixed"            # global opinion densities
    DENSITY = "density"        # opinion mix of susceptibles with the same degree
    NEIGHBORHOOD = "neighborhood"  # pair-closed, conditioned on both arms


@dataclass
class PAState:
    """Indexed expected densities: 12 singles plus 17 dyad families.

    ``singles[Y, X, i, j]``: opinion Y (U,P,A,R = 0..3), disease X (S,I,R =
    0..2), degree indices (i, j) into (k_info, k_phy).
    ``phy_dyads[Y, z, i, j, m]``: center Y_{k1}S_{k2}, neighbor disease z
    (I, S = 0, 1) with phy-degree k_phy[m].
    ``info_dyads[x, w, i, j, m]``: center U_{k1}X_{k2} with disease x,
    neighbor opinion w (A, P, U = 0, 1, 2) with info-degree k_info[m].
    """

    k_info: np.ndarray
    k_phy: np.ndarray
    singles: np.ndarray
    phy_dyads: np.ndarray
    info_dyads: np.ndarray

    @classmethod
    def zeros(cls, k_info, k_phy):
        n1, n2 = len(k_info), len(k_phy)
        return cls(np.asarray(k_info, dtype=np.int64), np.asarray(k_phy, dtype=np.int64),
                   np.zeros((4, 3, n1, n2)), np.zeros((4, 2, n1, n2, n2)),
                   np.zeros((3, 3, n1, n2, n1)))

    @classmethod
    def from_flat(cls, y, k_info, k_phy):
        n1, n2 = len(k_info), len(k_phy)
        n_s = 12 * n1 * n2
        n_p = 8 * n1 * n2 * n2
        singles = y[:n_s].reshape(4, 3, n1, n2)
        phyd = y[n_s:n_s + n_p].reshape(4, 2, n1, n2, n2)
        infod = y[n_s + n_p:].reshape(3, 3, n1, n2, n1)
        return cls(np.asarray(k_info), np.asarray(k_phy), singles, phyd, infod)

    def to_flat(self):
        return np.concatenate([self.singles.ravel(), self.phy_dyads.ravel(),
                               self.info_dyads.ravel()])

    def compartment_fractions(self):
        """(12,) expected fractions in compartment order US..RR."""
        out = np.empty(12)
        for y in range(4):
            for x in range(3):
                out[y * 3 + x] = self.singles[y, x].sum()
        return out


def close_triple_same_layer(pair_xy, pair_yz, single_y, k):
    """[X ~ Y_k ~ Z] with both edges in one layer: (k-1)/k [X~Y][Y~Z]/[Y]."""
    if k <= 1 or single_y < EPS:
        return 0.0
    return (k - 1.0) / k * pair_xy * pair_yz / single_y


def close_triple_cross_layer(pair_x_center, pair_center_z, single_center):
    """[X ~ c ~ Z] with the two edges in different layers: [X~c][c~Z]/[c]."""
    if single_center < EPS:
        return 0.0
    return pair_x_center * pair_center_z / single_center


def _safe_ratio(num, den):
    return np.where(den > EPS, num / np.where(den > EPS, den, 1.0), 0.0)


def beta_hat_matrix(state, params, scheme):
    """Expected transmission rate bh[m, j] for a susceptible node of phy-degree
    k_phy[m] adjacent to a tracked susceptible of phy-degree k_phy[j].

    Returns (bh, n_fallback): entries where every contributing term vanished
    fall back to the bare rate beta_phy.
    """
    bf = params.beta_phy
    alphas = np.array([1.0, params.alpha_pro, params.alpha_anti, 1.0])
    n2 = len(state.k_phy)
    scheme = BetaHatScheme(scheme)
    if scheme == BetaHatScheme.MIXED:
        dens = state.singles.sum(axis=(1, 2, 3))  # per-opinion global density
        tot = dens.sum()
        if tot < EPS:
            return np.full((n2, n2), bf), n2 * n2
        val = bf * float(alphas @ dens / tot)
        return np.full((n2, n2), val), 0
    if scheme == BetaHatScheme.DENSITY:
        ys_l = state.singles[:, 0].sum(axis=1)  # (4, n2): [Y S_l]
        den = ys_l.sum(axis=0)
        num = alphas @ ys_l
        valid = den > EPS
        row = np.where(valid, bf * _safe_ratio(num, den), bf)
        return np.repeat(row[:, None], n2, axis=1), int((~valid).sum())
    # neighborhood scheme: pair-closed form, vanishing terms dropped from
    # both numerator and denominator
    pd_i = state.phy_dyads[:, 0].sum(axis=-1)  # (4, n1, n2): [Y_k S_l ~ I]
    w = _safe_ratio(pd_i, state.singles[:, 0])  # (4, n1, n2)
    f = np.einsum("yilm,yil->ylm", state.phy_dyads[:, 1], w)  # (4, n2, n2)
    num = np.tensordot(alphas, f, axes=1)
    den = f.sum(axis=0)
    valid = den > EPS
    bh = np.where(valid, bf * _safe_ratio(num, den), bf)
    return bh, int((~valid).sum())


def beta_hat(scheme, state, params, l, k2):
    """Scalar expected transmission rate for neighbor degree l, center degree k2."""
    m = int(np.searchsorted(state.k_phy, l))
    j = int(np.searchsorted(state.k_phy, k2))
    if m >= len(state.k_phy) or state.k_phy[m] != l or \
            j >= len(state.k_phy) or state.k_phy[j] != k2:
        raise ValueError(f"degrees ({l}, {k2}) not in the tracked phy support")
    bh, _ = beta_hat_matrix(state, params, scheme)
    return float(bh[m, j])


def pa_rhs(state, params, scheme, telemetry=None):
    """Time derivative of a PAState under the closed pair dynamics."""
    k1 = state.k_info.astype(float)
    k2 = state.k_phy.astype(float)
    S = np.maximum(state.singles, 0.0)
    PD = np.maximum(state.phy_dyads, 0.0)
    ID = np.maximum(state.info_dyads, 0.0)
    st = PAState(state.k_info, state.k_phy, S, PD, ID)

    bp, ba = params.beta_pro, params.beta_anti
    gp, ga = params.gamma_pro, params.gamma_anti
    bf, gf, tau = params.beta_phy, params.gamma_phy, params.tau
    b_own = np.array([bf, params.alpha_pro * bf, params.alpha_anti * bf, bf])

    pd_i = PD[:, 0].sum(axis=-1)            # (4, n1, n2): [Y_{k1}S_{k2} ~ I]
    id_sum = ID.sum(axis=-1)                # (3, 3, n1, n2): [U_{k1}X_{k2} ~ w]
    own_inf = _safe_ratio(pd_i, S[:, 0])    # (4, n1, n2): [YS ~ I] / [YS]
    ratio_a = _safe_ratio(id_sum[:, 0], S[0])  # (3, n1, n2): [UX ~ A] / [UX]
    ratio_p = _safe_ratio(id_sum[:, 1], S[0])

    s_l = S[:, 0].sum(axis=(0, 1))          # (n2,): [S_l]
    si_edge = pd_i.sum(axis=(0, 1))         # (n2,): [S_l ~ I]
    si_ratio = _safe_ratio(si_edge, s_l)

    u_l = S[0].sum(axis=(0, 2))             # (n1,): [U_l]
    ua_edge = id_sum[:, 0].sum(axis=(0, 2))  # (n1,): [U_l ~ A]
    up_edge = id_sum[:, 1].sum(axis=(0, 2))
    ua_ratio = _safe_ratio(ua_edge, u_l)
    up_ratio = _safe_ratio(up_edge, u_l)

    with np.errstate(divide="ignore", invalid="ignore"):
        lfac_phy = np.where(k2 > 0, (k2 - 1.0) / np.maximum(k2, 1.0), 0.0)
        lfac_info = np.where(k1 > 0, (k1 - 1.0) / np.maximum(k1, 1.0), 0.0)

    bh, n_fallback = beta_hat_matrix(st, params, scheme)
    if telemetry is not None:
        telemetry.observe(bh, n_fallback)

    # --- singles -----------------------------------------------------------
    dS = np.zeros_like(S)
    infect = b_own[:, None, None] * pd_i    # (4, n1, n2)
    us, ui, ur = S[0, 0], S[0, 1], S[0, 2]
    ps, pi_, pr = S[1, 0], S[1, 1], S[1, 2]
    as_, ai, ar = S[2, 0], S[2, 1], S[2, 2]
    rs, ri, rr = S[3, 0], S[3, 1], S[3, 2]
    dS[0, 0] = -infect[0] - ba * id_sum[0, 0] - bp * id_sum[0, 1] + tau * rs
    dS[0, 1] = infect[0] - gf * ui - ba * id_sum[1, 0] - bp * id_sum[1, 1] + tau * ri
    dS[0, 2] = gf * ui - ba * id_sum[2, 0] - bp * id_sum[2, 1] + tau * rr
    dS[1, 0] = -infect[1] + bp * id_sum[0, 1] - gp * ps
    dS[1, 1] = infect[1] - gf * pi_ + bp * id_sum[1, 1] - gp * pi_
    dS[1, 2] = gf * pi_ + bp * id_sum[2, 1] - gp * pr
    dS[2, 0] = -infect[2] + ba * id_sum[0, 0] - ga * as_
    dS[2, 1] = infect[2] - gf * ai + ba * id_sum[1, 0] - ga * ai
    dS[2, 2] = gf * ai + ba * id_sum[2, 0] - ga * ar
    dS[3, 0] = -infect[3] + ga * as_ + gp * ps - tau * rs
    dS[3, 1] = infect[3] - gf * ri + ga * ai + gp * pi_ - tau * ri
    dS[3, 2] = gf * ri + ga * ar + gp * pr - tau * rr

    # --- physical-layer dyads ---------------------------------------------
    # gain: the S_l neighbor is infected through its other arms at rate bh
    gain = (lfac_phy[None, None, None, :] * PD[:, 1]
            * si_ratio[None, None, None, :] * bh.T[None, None, :, :])
    # the center is infected through arms other than the tracked one
    other_arm = (own_inf * lfac_phy[None, None, :])[:, :, :, None]
    cross_u = (ba * ratio_a[0] + bp * ratio_p[0])[None, :, :, None]  # U center adopts

    dPD = np.zeros_like(PD)
    dPD[0, 0] = (gain[0] - b_own[0] * PD[0, 0] - b_own[0] * other_arm[0] * PD[0, 0]
                 - gf * PD[0, 0] - cross_u[0] * PD[0, 0] + tau * PD[3, 0])
    dPD[0, 1] = (-gain[0] - b_own[0] * other_arm[0] * PD[0, 1]
                 - cross_u[0] * PD[0, 1] + tau * PD[3, 1])
    adopt_p = (bp * ratio_p[0])[:, :, None]
    adopt_a = (ba * ratio_a[0])[:, :, None]
    dPD[1, 0] = (gain[1] - b_own[1] * PD[1, 0] - b_own[1] * other_arm[1] * PD[1, 0]
                 - gf * PD[1, 0] + adopt_p * PD[0, 0] - gp * PD[1, 0])
    dPD[1, 1] = (-gain[1] - b_own[1] * other_arm[1] * PD[1, 1]
                 + adopt_p * PD[0, 1] - gp * PD[1, 1])
    dPD[2, 0] = (gain[2] - b_own[2] * PD[2, 0] - b_own[2] * other_arm[2] * PD[2, 0]
                 - gf * PD[2, 0] + adopt_a * PD[0, 0] - ga * PD[2, 0])
    dPD[2, 1] = (-gain[2] - b_own[2] * other_arm[2] * PD[2, 1]
                 + adopt_a * PD[0, 1] - ga * PD[2, 1])
    dPD[3, 0] = (gain[3] - b_own[3] * PD[3, 0] - b_own[3] * other_arm[3] * PD[3, 0]
                 - gf * PD[3, 0] + ga * PD[2, 0] + gp * PD[1, 0] - tau * PD[3, 0])
    dPD[3, 1] = (-gain[3] - b_own[3] * other_arm[3] * PD[3, 1]
                 + ga * PD[2, 1] + gp * PD[1, 1] - tau * PD[3, 1])

    # --- information-layer dyads -------------------------------------------
    # neighbor U_l adopts an opinion through its other info arms
    gain_a = lfac_info[None, None, None, :] * ID[:, 2] * ua_ratio[None, None, None, :]
    gain_p = lfac_info[None, None, None, :] * ID[:, 2] * up_ratio[None, None, None, :]
    # the center adopts an opinion through info arms other than the tracked one
    arm = (lfac_info[:, None] * (ba * ratio_a + bp * ratio_p))[:, :, :, None]  # (3,n1,n2,1)
    push = (bf * own_inf[0])[:, :, None]  # center U_{k1}S_{k2} infected (cross-layer)

    dID = np.zeros_like(ID)
    src = np.empty_like(ID)
    src[0] = -push[None] * ID[0]
    src[1] = push[None] * ID[0] - gf * ID[1]
    src[2] = gf * ID[1]
    for w, (bw, gw) in enumerate(((ba, ga), (bp, gp))):  # w=0: A_l, w=1: P_l
        g_w = gain_a if w == 0 else gain_p
        dID[:, w] = (src[:, w] - arm * ID[:, w] - bw * ID[:, w]
                     - gw * ID[:, w] + bw * g_w)
    dID[:, 2] = (src[:, 2] - arm * ID[:, 2] - ba * gain_a - bp * gain_p)

    return PAState(state.k_info, state.k_phy, dS, dPD, dID)


@dataclass
class BetaHatTelemetry:
    """Running extrema of the effective transmission rate across RHS calls."""

    min_value: float = math.inf
    max_value: float = -math.inf
    n_fallback: int = 0
    n_calls: int = 0

    def observe(self, bh, n_fallback):
        self.min_value = min(self.min_value, float(bh.min()))
        self.max_value = max(self.max_value, float(bh.max()))
        self.n_fallback += n_fallback
        self.n_calls += 1


def init_pa_state(info_mixing, phy_mixing, coupling, init):
    """Initial PAState from layer mixing structure and seed fractions.

    Singles are products of the node-type probability C[k1, k2] and the seed
    fractions. Dyads follow the edge structure: the info (phy) neighbor's
    degree is drawn from the corresponding mixing matrix row, and the
    center's other-layer degree from C conditioned on its this-layer degree.
    With uncorrelated inputs this reduces to the configuration-model product
    k1 k3 / <k_info> (and its phy analogue).
    """
    p_info = info_mixing.degree_distribution().probs
    p_phy = phy_mixing.degree_distribution().probs
    k_info, k_phy = info_mixing.degrees, phy_mixing.degrees
    if coupling is None:
        C = np.outer(p_info, p_phy)
    else:
        if not np.array_equal(coupling.info_degrees, k_info) or \
                not np.array_equal(coupling.phy_degrees, k_phy):
            raise ConfigurationError("coupling degree supports must match the layers")
        if not np.allclose(coupling.info_marginal(), p_info, atol=1e-8) or \
                not np.allclose(coupling.phy_marginal(), p_phy, atol=1e-8):
            raise ConfigurationError(
                "coupling marginals disagree with the layer degree distributions")
        C = coupling.C
    mean_info = info_mixing.mean_degree
    mean_phy = phy_mixing.mean_degree

    op0 = np.array([1.0 - init.a0 - init.p0, init.p0, init.a0, 0.0])
    dis0 = np.array([1.0 - init.i0, init.i0, 0.0])

    st = PAState.zeros(k_info, k_phy)
    st.singles[:] = op0[:, None, None, None] * dis0[None, :, None, None] * C[None, None]

    cond_phy = _safe_ratio(C, p_phy[None, :])   # C[k1, k2] / P_phy(k2)
    cond_info = _safe_ratio(C, p_info[:, None])  # C[k1, k2] / P_info(k1)

    # [Y_{k1}S_{k2} ~ Z_l](0) = [S_{k2} ~ Z_l](0) * C/P_phy(k2) * op0[Y] with
    # [S_{k2} ~ Z_l](0) = <k_phy> E_phy[k2, l] * dis0[S] * dis0[Z]
    s_edge = mean_phy * phy_mixing.E * dis0[0]  # (n2 center, n2 neighbor)
    for y in range(4):
        for z, zdis in enumerate((1, 0)):  # neighbor I then S
            st.phy_dyads[y, z] = (op0[y] * dis0[zdis]
                                  * cond_phy[:, :, None] * s_edge[None, :, :])

    # [U_{k1}X_{k2} ~ W_l](0) = [U_{k1} ~ W_l](0) * C/P_info(k1) * dis0[X] with
    # [U_{k1} ~ W_l](0) = <k_info> E_info[k1, l] * op0[U] * op0[W]
    u_edge = mean_info * info_mixing.E * op0[0]  # (n1 center, n1 neighbor)
    for x in range(3):
        for w, wop in enumerate((2, 1, 0)):  # neighbor A, P, U
            st.info_dyads[x, w] = (dis0[x] * op0[wop]
                                   * cond_info[:, :, None] * u_edge[:, None, :])
    return st


@dataclass
class PAResult:
    times: np.ndarray
    fractions: np.ndarray  # (n_samples, 12) compartment fractions
    final_size: float
    peak_prevalence: float
    peak_time: float
    stopped_at: float | None
    telemetry: BetaHatTelemetry
    max_clamp: float
    states: np.ndarray | None = None
    k_info: np.ndarray | None = None
    k_phy: np.ndarray | None = None

    def infectious(self):
        return self.fractions[:, 1::3].sum(axis=1)

    def conservation_error(self):
        return float(np.abs(self.fractions.sum(axis=1) - 1.0).max())

    def write_csv(self, fh):
        fh.write("t," + ",".join(COMPARTMENTS) + "\n")
        for t, row in zip(self.times, self.fractions):
            fh.write(f"{float(t)!r}," + ",".join(repr(float(v)) for v in row) + "\n")

    def write_full_state_csv(self, fh):
        if self.states is None:
            raise ValueError("run with keep_states=True to dump the full state")
        names = _slot_names(self.k_info, self.k_phy)
        fh.write("t," + ",".join(names) + "\n")
        for t, row in zip(self.times, self.states):
            fh.write(f"{float(t)!r}," + ",".join(repr(float(v)) for v in row) + "\n")


def _slot_names(k_info, k_phy):
    ops = "UPAR"
    dis = "SIR"
    names = []
    for y in range(4):
        for x in range(3):
            for a in k_info:
                for b in k_phy:
                    names.append(f"{ops[y]}{dis[x]}@{a}.{b}")
    for y in range(4):
        for z in "IS":
            for a in k_info:
                for b in k_phy:
                    for c in k_phy:
                        names.append(f"{ops[y]}S@{a}.{b}~{z}@{c}")
    for x in range(3):
        for w in "APU":
            for a in k_info:
                for b in k_phy:
                    for c in k_info:
                        names.append(f"U{dis[x]}@{a}.{b}~{w}@{c}")
    return names


class PairApproximation:
    """Closed pair dynamics for a given network specification and parameters."""

    def __init__(self, info_mixing, phy_mixing, params, scheme=BetaHatScheme.NEIGHBORHOOD,
                 coupling=None):
        if isinstance(info_mixing, MixingMatrix):
            self.info_mixing = info_mixing
        else:
            self.info_mixing = MixingMatrix.uncorrelated(info_mixing)
        if isinstance(phy_mixing, MixingMatrix):
            self.phy_mixing = phy_mixing
        else:
            self.phy_mixing = MixingMatrix.uncorrelated(phy_mixing)
        self.params = params
        self.scheme = BetaHatScheme(scheme)
        self.coupling = coupling
        self.k_info = self.info_mixing.degrees
        self.k_phy = self.phy_mixing.degrees
        self._n1, self._n2 = len(self.k_info), len(self.k_phy)

    def initial_state(self, init):
        return init_pa_state(self.info_mixing, self.phy_mixing, self.coupling, init)

    def _i_mass(self, y):
        n_s = 12 * self._n1 * self._n2
        return y[:n_s].reshape(4, 3, self._n1, self._n2)[:, 1].sum()

    def run(self, init, t_end=200.0, rel_tol=1e-8, abs_tol=1e-10, sample_dt=0.1,
            keep_states=False, stop_at_extinction=True):
        telemetry = BetaHatTelemetry()
        y0 = self.initial_state(init).to_flat()

        def rhs(t, y):
            st = PAState.from_flat(y, self.k_info, self.k_phy)
            return pa_rhs(st, self.params, self.scheme, telemetry).to_flat()

        stop = (lambda _t, y: self._i_mass(y) - EXTINCTION_THRESHOLD) \
            if stop_at_extinction else None
        res = integrate(rhs, y0, t_end, rel_tol=rel_tol, abs_tol=abs_tol,
                        sample_dt=sample_dt, stop=stop)
        fracs = np.empty((len(res.times), 12))
        for k, row in enumerate(res.states):
            fracs[k] = PAState.from_flat(row, self.k_info, self.k_phy).compartment_fractions()
        i_curve = fracs[:, 1::3].sum(axis=1)
        peak = int(np.argmax(i_curve))
        final = float(fracs[-1, 2::3].sum())  # disease-recovered mass at stop
        return PAResult(res.times, fracs, final, float(i_curve[peak]),
                        float(res.times[peak]), res.stopped_at, telemetry,
                        res.max_clamp,
                        states=res.states if keep_states else None,
                        k_info=self.k_info, k_phy=self.k_phy)
