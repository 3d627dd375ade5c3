"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Statistical criteria use fixed seeds, so outcomes are reproducible.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from cospread import ctmc
from cospread.analysis import opinion_history_stats
from cospread.contagion import InitialConditions, Params
from cospread.gillespie import initialize_states, simulate
from cospread.meanfield import BetaHatScheme, FullyMixedModel, PairApproximation
from cospread.networks import (
    DegreeDistribution,
    build_configuration_layer,
    build_correlated_layer,
    couple_layers,
    measure_inter_correlation,
    measure_intra_assortativity,
    sample_degree_sequence,
    two_point_a_for_assortativity,
    two_point_a_for_inter_pearson,
    two_point_inter_matrix,
    two_point_mixing_for_assortativity,
)

from conftest import multiplex_from_edges


def _report(criterion, ok, detail):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {criterion} failed: {detail}"


def _rng(*key):
    return np.random.default_rng(np.random.SeedSequence(key))


FIG4_PARAMS = Params.from_dict(dict(beta_info=0.6, gamma_info=1.0, beta_phy=0.6,
                                    gamma_phy=1.0, alpha_pro=0.1, alpha_anti=10.0))
STANDARD_INIT = InitialConditions(i0=0.01, a0=0.005, p0=0.005)
REGULAR5 = DegreeDistribution.regular(5)


def _regular5_multiplex(rng, n=10000):
    info = build_configuration_layer(sample_degree_sequence(REGULAR5, n, rng), rng)
    phy = build_configuration_layer(sample_degree_sequence(REGULAR5, n, rng), rng)
    return couple_layers(info, phy, None, rng)


def test_criterion_1_fully_mixed_neutrality():
    """Symmetric opinions with alpha_pro + alpha_anti = 2 leave the final size
    at the opinion-free baseline within 1e-8."""
    params = Params(beta_pro=2.0, beta_anti=2.0, gamma_pro=0.7, gamma_anti=0.7,
                    beta_phy=1.0, gamma_phy=0.5, alpha_pro=0.6, alpha_anti=1.4)
    init = InitialConditions(i0=0.01, a0=0.05, p0=0.05)
    with_opinions = FullyMixedModel(params).run(init, rel_tol=1e-11, abs_tol=1e-13)
    baseline = FullyMixedModel(params.neutralized()).run(init, rel_tol=1e-11,
                                                         abs_tol=1e-13)
    diff = abs(with_opinions.final_size - baseline.final_size)
    _report(1, diff < 1e-8, f"|final - baseline| = {diff:.2e}")


def test_criterion_2_sir_final_size_oracle():
    """Opinion-free fully-mixed run matches the transcendental final-size
    fixed point z = 1 - exp(-2 z) within 1e-6."""
    lo, hi = 1e-12, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - (1.0 - math.exp(-2.0 * mid)) < 0:
            lo = mid
        else:
            hi = mid
    z_star = 0.5 * (lo + hi)  # ~0.7968121300
    res = FullyMixedModel(Params(beta_phy=1.0, gamma_phy=0.5)).run(
        InitialConditions(i0=1e-9), t_end=200.0, rel_tol=1e-10, abs_tol=1e-13)
    err = abs(res.final_size - z_star)
    _report(2, err < 1e-6, f"final = {res.final_size:.8f}, fixed point = {z_star:.8f}, "
                           f"err = {err:.2e}")


@pytest.mark.parametrize("tau", [0.0, 1.0])
def test_criterion_3_ctmc_oracle_equivalence(tau):
    """Engine marginals on a 3-node multiplex match the exact chain within
    3 sigma for all 12 compartments at t in {0.5, 2}."""
    net = multiplex_from_edges(3, [(0, 1), (0, 2)], [(0, 1), (1, 2)])
    params = Params(beta_pro=0.6, beta_anti=0.6, gamma_pro=1.0, gamma_anti=1.0,
                    tau=tau, beta_phy=0.6, gamma_phy=1.0,
                    alpha_pro=0.1, alpha_anti=10.0)
    ops = np.array([1, 0, 2], dtype=np.int8)
    dis = np.array([0, 1, 0], dtype=np.int8)
    Q = ctmc.build_generator(net, params)
    p0 = np.zeros(ctmc.n_states(3))
    p0[ctmc.pack_state(ops, dis)] = 1.0

    n_runs = 100000
    children = np.random.SeedSequence((616, int(tau * 10))).spawn(n_runs)
    acc = {0.5: np.zeros(12), 2.0: np.zeros(12)}
    for k in range(n_runs):
        traj, _ = simulate(net, params, ops, dis, np.random.default_rng(children[k]),
                           t_max=2.0, sample_dt=0.5, stop_at_extinction=False)
        acc[0.5] += traj.counts[1]
        acc[2.0] += traj.counts[4]

    worst = 0.0
    ok = True
    for t in (0.5, 2.0):
        p_t = ctmc.transient_distribution(Q, p0, t)
        emp = acc[t] / (n_runs * 3)
        for c in range(12):
            mean_k, var_k = ctmc.compartment_count_moments(p_t, 3, c)
            sigma = math.sqrt(max(var_k, 0.0) / 9.0 / n_runs)
            dev = abs(emp[c] - mean_k / 3.0)
            if sigma == 0.0:
                ok &= dev == 0.0
            else:
                worst = max(worst, dev / sigma)
                ok &= dev <= 3.0 * sigma
    _report(3, ok, f"tau={tau}: worst deviation {worst:.2f} sigma over "
                   f"12 compartments x 2 times, {n_runs} runs")


def _fig4_sim_mean(n_runs=100, n=10000, t_max=30.0):
    def one(k):
        rng = _rng(414, k)
        net = _regular5_multiplex(rng, n)
        op0, dis0 = initialize_states(n, STANDARD_INIT, rng)
        traj, _ = simulate(net, FIG4_PARAMS, op0, dis0, rng, t_max=t_max)
        return traj.fractions()[:, 1::3].sum(axis=1)
    with ThreadPoolExecutor(max_workers=2) as ex:
        curves = list(ex.map(one, range(n_runs)))
    return np.mean(curves, axis=0)


def test_criterion_4_scheme_comparison_reproduction():
    """Neighborhood-closed transmission rate reproduces the 100-run ensemble
    mean prevalence (peak within 10 percent, peak time within 1 time unit);
    the two coarser schemes overshoot the peak."""
    mean_i = _fig4_sim_mean()
    sim_peak_idx = int(np.argmax(mean_i))
    sim_peak = float(mean_i[sim_peak_idx])
    sim_peak_time = sim_peak_idx * 0.1

    peaks = {}
    times = {}
    for scheme in BetaHatScheme:
        res = PairApproximation(REGULAR5, REGULAR5, FIG4_PARAMS, scheme).run(
            STANDARD_INIT, t_end=30.0)
        peaks[scheme] = res.peak_prevalence
        times[scheme] = res.peak_time

    rel = abs(peaks[BetaHatScheme.NEIGHBORHOOD] - sim_peak) / sim_peak
    dt = abs(times[BetaHatScheme.NEIGHBORHOOD] - sim_peak_time)
    ordered = (peaks[BetaHatScheme.MIXED] > peaks[BetaHatScheme.NEIGHBORHOOD]
               and peaks[BetaHatScheme.DENSITY] > peaks[BetaHatScheme.NEIGHBORHOOD])
    ok = rel <= 0.10 and dt <= 1.0 and ordered
    _report(4, ok, f"sim peak {sim_peak:.4f}@{sim_peak_time:.1f}, neighborhood "
                   f"{peaks[BetaHatScheme.NEIGHBORHOOD]:.4f}@{times[BetaHatScheme.NEIGHBORHOOD]:.1f} "
                   f"(rel err {rel:.3f}), mixed {peaks[BetaHatScheme.MIXED]:.4f}, "
                   f"density {peaks[BetaHatScheme.DENSITY]:.4f}")


def test_criterion_5_final_size_non_monotonicity():
    """Final size vs opinion recovery rate rises above the basic size at an
    interior point and returns to it (within 2 percent absolute) by
    gamma_info = 2."""
    basic = PairApproximation(REGULAR5, REGULAR5, FIG4_PARAMS.neutralized(),
                              BetaHatScheme.NEIGHBORHOOD).run(STANDARD_INIT).final_size
    gammas = np.round(np.arange(0.1, 2.01, 0.1), 10)
    finals = []
    for g in gammas:
        params = Params.from_dict(dict(beta_info=0.6, gamma_info=float(g),
                                       beta_phy=0.6, gamma_phy=1.0,
                                       alpha_pro=0.1, alpha_anti=10.0))
        finals.append(PairApproximation(REGULAR5, REGULAR5, params,
                                        BetaHatScheme.NEIGHBORHOOD).run(
            STANDARD_INIT).final_size)
    finals = np.array(finals)
    interior_exceeds = bool(finals[:-1].max() > basic)
    end_gap = abs(finals[-1] - basic)
    ok = interior_exceeds and end_gap <= 0.02
    _report(5, ok, f"basic {basic:.4f}, interior max {finals[:-1].max():.4f}, "
                   f"value at gamma_info=2: {finals[-1]:.4f} (gap {end_gap:.4f})")


def test_criterion_6_generator_fidelity():
    """Mean empirical correlations over 10 realizations at n = 10000 land
    within 0.02 of every feasible target."""
    n, n_real = 10000, 10
    detail = []
    ok = True
    for target in (-0.25, 0.0, 0.5, 1.0):
        E = two_point_mixing_for_assortativity(2, 8, 0.5, target)
        vals = [measure_intra_assortativity(build_correlated_layer(E, n, _rng(66, i)))
                for i in range(n_real)]
        dev = abs(np.mean(vals) - target)
        ok &= dev < 0.02
        detail.append(f"intra {target:+.2f}:{dev:.4f}")
    E0 = two_point_mixing_for_assortativity(2, 8, 0.5, 0.0)
    for target in (-1.0, 0.0, 0.5, 1.0):
        C = two_point_inter_matrix(0.5, 0.5,
                                   two_point_a_for_inter_pearson(0.5, 0.5, target))
        vals = []
        for i in range(n_real):
            rng = _rng(67, int(target * 4) + 8, i)
            joint = np.round(C.C * n).astype(int)
            counts_i = joint.sum(axis=1)
            counts_p = joint.sum(axis=0)
            info = build_correlated_layer(E0, n, rng, node_counts=counts_i)
            phy = build_correlated_layer(E0, n, rng, node_counts=counts_p)
            vals.append(measure_inter_correlation(couple_layers(info, phy, C, rng)))
        dev = abs(np.mean(vals) - target)
        ok &= dev < 0.02
        detail.append(f"inter {target:+.2f}:{dev:.4f}")
    _report(6, ok, "; ".join(detail))


def test_criterion_7_conservation_suite():
    """Pair-approximation mass stays normalized within 1e-6, the effective
    rate stays inside its bounds at every evaluation, and simulated counts
    sum exactly to the population size."""
    ok = True
    detail = []
    lo = FIG4_PARAMS.alpha_pro * FIG4_PARAMS.beta_phy
    hi = FIG4_PARAMS.alpha_anti * FIG4_PARAMS.beta_phy
    worst_cons = 0.0
    for scheme in BetaHatScheme:
        res = PairApproximation(REGULAR5, REGULAR5, FIG4_PARAMS, scheme).run(
            STANDARD_INIT, t_end=30.0)
        worst_cons = max(worst_cons, res.conservation_error())
        ok &= res.conservation_error() < 1e-6
        ok &= res.telemetry.min_value >= lo - 1e-12
        ok &= res.telemetry.max_value <= hi + 1e-12
    for g in (0.1, 0.5, 1.0, 1.5, 2.0):
        params = Params.from_dict(dict(beta_info=0.6, gamma_info=g, beta_phy=0.6,
                                       gamma_phy=1.0, alpha_pro=0.1, alpha_anti=10.0))
        res = PairApproximation(REGULAR5, REGULAR5, params,
                                BetaHatScheme.NEIGHBORHOOD).run(STANDARD_INIT)
        worst_cons = max(worst_cons, res.conservation_error())
        ok &= res.conservation_error() < 1e-6
        ok &= res.telemetry.min_value >= lo - 1e-12
        ok &= res.telemetry.max_value <= hi + 1e-12
    detail.append(f"max PA mass error {worst_cons:.2e}, rate bounds [{lo}, {hi}] held")
    for k in range(5):
        rng = _rng(77, k)
        net = _regular5_multiplex(rng, 10000)
        op0, dis0 = initialize_states(10000, STANDARD_INIT, rng)
        traj, _ = simulate(net, FIG4_PARAMS, op0, dis0, rng, t_max=30.0)
        ok &= bool(np.all(traj.counts.sum(axis=1) == 10000))
    detail.append("counts sum to N exactly in 5/5 sims")
    _report(7, ok, "; ".join(detail))


def test_criterion_8_tau_zero_reduction():
    """With tau = 0 the single engine code path reproduces the permanent-
    immunity model: byte-identical event logs for the same seed and exactly
    zero double-opinion adopters."""
    params = Params.from_dict(dict(beta_info=0.6, gamma_info=0.5, beta_phy=0.6,
                                   gamma_phy=1.0, alpha_pro=0.1, alpha_anti=10.0,
                                   tau=0.0))
    dist = DegreeDistribution.poisson(5)
    logs = []
    for _ in range(2):
        rng = _rng(88)
        n = 10000
        info = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
        phy = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
        net = couple_layers(info, phy, None, rng)
        op0, dis0 = initialize_states(n, STANDARD_INIT, rng)
        _, log = simulate(net, params, op0, dis0, rng, t_max=40.0)
        logs.append(log)
    identical = logs[0].csv_bytes() == logs[1].csv_bytes()
    no_reset = not np.any(logs[0].kinds == 4)
    both = opinion_history_stats(logs[0])["frac_both_opinions"]
    ok = identical and no_reset and both == 0.0
    _report(8, ok, f"byte-identical logs: {identical}, R->U events: "
                   f"{int(np.sum(logs[0].kinds == 4))}, frac_both_opinions = {both}")


def test_criterion_9_double_opinion_statistics():
    """With fast opinion turnover (gamma_info = 2) more people hold both
    opinions than with slow turnover (gamma_info = 0.2), for every immunity
    loss rate tau in {0.5, 1, 2} (200-run ensembles)."""
    dist = DegreeDistribution.poisson(5)
    n = 10000
    n_runs = 200

    def ensemble_mean(gamma_info, tau):
        params = Params.from_dict(dict(beta_info=2.0, gamma_info=gamma_info,
                                       beta_phy=0.6, gamma_phy=1.0,
                                       alpha_pro=0.1, alpha_anti=10.0, tau=tau))

        def one(k):
            rng = _rng(99, int(gamma_info * 10), int(tau * 10), k)
            info = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
            phy = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
            net = couple_layers(info, phy, None, rng)
            op0, dis0 = initialize_states(n, STANDARD_INIT, rng)
            _, log = simulate(net, params, op0, dis0, rng, t_max=60.0)
            return opinion_history_stats(log)["frac_both_opinions"]

        with ThreadPoolExecutor(max_workers=2) as ex:
            vals = list(ex.map(one, range(n_runs)))
        return float(np.mean(vals))

    ok = True
    detail = []
    for tau in (0.5, 1.0, 2.0):
        slow = ensemble_mean(0.2, tau)
        fast = ensemble_mean(2.0, tau)
        ok &= fast > slow
        detail.append(f"tau={tau}: {fast:.4f} > {slow:.4f}")
    _report(9, ok, "; ".join(detail))
