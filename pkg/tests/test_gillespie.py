import numpy as np
import pytest

from cospread import ctmc
from cospread.contagion import InitialConditions, Params
from cospread.errors import ConfigurationError
from cospread.gillespie import initialize_states, simulate
from cospread.networks import build_configuration_layer, couple_layers

from conftest import multiplex_from_edges


FULL = Params(beta_pro=0.6, beta_anti=0.6, gamma_pro=1.0, gamma_anti=1.0,
              tau=1.0, beta_phy=0.6, gamma_phy=1.0, alpha_pro=0.1, alpha_anti=10.0)


def _rng(*key):
    return np.random.default_rng(np.random.SeedSequence(key))


# ---------------------------------------------------------------------------
# initialization
# ---------------------------------------------------------------------------


def test_initialize_states_exact_counts():
    op, dis = initialize_states(10000, InitialConditions(0.01, 0.005, 0.005), _rng(0))
    assert (dis == 1).sum() == 100
    assert (op == 2).sum() == 50  # anti
    assert (op == 1).sum() == 50  # pro
    assert ((op == 0) & (dis == 0)).sum() >= 10000 - 200


def test_initialize_states_trivial_cases():
    op, dis = initialize_states(50, InitialConditions(0, 0, 0), _rng(1))
    assert np.all(op == 0) and np.all(dis == 0)
    op, dis = initialize_states(10, InitialConditions(1.0, 0, 0), _rng(2))
    assert np.all(dis == 1)


def test_initialize_states_overfull_raises():
    with pytest.raises(ConfigurationError):
        initialize_states(10, InitialConditions(0.0, 0.7, 0.7), _rng(3))


def test_all_infectious_pure_death():
    net = multiplex_from_edges(10, [], [(i, (i + 1) % 10) for i in range(10)])
    op, dis = initialize_states(10, InitialConditions(1.0, 0, 0), _rng(4))
    traj, log = simulate(net, FULL, op, dis, _rng(5), t_max=100.0)
    assert traj.extinct
    assert np.all(log.kinds == 6)  # only recoveries
    assert traj.counts[-1, 2::3].sum() == 10


# ---------------------------------------------------------------------------
# exactness on tiny instances
# ---------------------------------------------------------------------------


def test_single_clock_mean_recovery_time():
    net = multiplex_from_edges(1, [], [])
    p = Params(gamma_phy=1.0)
    op = np.array([0], dtype=np.int8)
    dis = np.array([1], dtype=np.int8)
    n_runs = 100000
    children = np.random.SeedSequence(42).spawn(n_runs)
    total = 0.0
    for k in range(n_runs):
        traj, log = simulate(net, p, op, dis, np.random.default_rng(children[k]),
                             t_max=200.0, sample_dt=200.0)
        total += log.times[0]
    assert abs(total / n_runs - 1.0) < 0.01


def test_two_node_infection_race():
    # transmission before recovery with probability 0.6 / 1.6
    net = multiplex_from_edges(2, [], [(0, 1)])
    p = Params(beta_phy=0.6, gamma_phy=1.0)
    op = np.array([0, 0], dtype=np.int8)
    dis = np.array([1, 0], dtype=np.int8)
    n_runs = 100000
    children = np.random.SeedSequence(43).spawn(n_runs)
    hits = 0
    for k in range(n_runs):
        traj, log = simulate(net, p, op, dis, np.random.default_rng(children[k]),
                             t_max=500.0, sample_dt=500.0)
        hits += int((log.kinds == 5).sum() > 0)
    p_exact = 0.6 / 1.6
    sigma = np.sqrt(p_exact * (1 - p_exact) / n_runs)
    assert abs(hits / n_runs - p_exact) < 3 * sigma


def test_marginals_match_ctmc_oracle(three_node_paths):
    # quick cross-check at one time point; the acceptance suite runs the
    # full-budget version at 3-sigma
    params = FULL
    ops = np.array([1, 0, 2], dtype=np.int8)
    dis = np.array([0, 1, 0], dtype=np.int8)
    Q = ctmc.build_generator(three_node_paths, params)
    p0 = np.zeros(ctmc.n_states(3))
    p0[ctmc.pack_state(ops, dis)] = 1.0
    exact = ctmc.expected_compartment_fractions(
        ctmc.transient_distribution(Q, p0, 1.0), 3)
    n_runs = 20000
    children = np.random.SeedSequence(44).spawn(n_runs)
    acc = np.zeros(12)
    for k in range(n_runs):
        traj, _ = simulate(three_node_paths, params, ops, dis,
                           np.random.default_rng(children[k]),
                           t_max=1.0, sample_dt=0.5, stop_at_extinction=False)
        acc += traj.counts[2]
    emp = acc / (n_runs * 3)
    sigma = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / (3 * n_runs))
    assert np.all(np.abs(emp - exact) < 4 * sigma + 1e-12)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def _medium_net(seed):
    rng = _rng(seed)
    info = build_configuration_layer(rng.permutation(np.repeat([2, 8], [250, 250])), rng)
    phy = build_configuration_layer(np.full(500, 4), rng)
    return couple_layers(info, phy, None, rng)


def test_counts_sum_to_n_every_sample():
    net = _medium_net(10)
    op, dis = initialize_states(500, InitialConditions(0.05, 0.02, 0.02), _rng(11))
    traj, _ = simulate(net, FULL, op, dis, _rng(12), t_max=30.0)
    assert np.all(traj.counts.sum(axis=1) == 500)


def test_monotone_cumulative_compartments():
    net = _medium_net(13)
    op, dis = initialize_states(500, InitialConditions(0.05, 0.02, 0.02), _rng(14))
    params = Params(beta_pro=0.6, beta_anti=0.6, gamma_pro=1.0, gamma_anti=1.0,
                    tau=0.0, beta_phy=0.6, gamma_phy=1.0, alpha_pro=0.1,
                    alpha_anti=10.0)
    traj, _ = simulate(net, params, op, dis, _rng(15), t_max=30.0)
    r_phy = traj.counts[:, 2::3].sum(axis=1)
    r_info = traj.counts[:, 9:12].sum(axis=1)
    assert np.all(np.diff(r_phy) >= 0)
    assert np.all(np.diff(r_info) >= 0)  # tau = 0: opinion recovery is permanent


def test_event_times_strictly_increasing():
    net = _medium_net(16)
    op, dis = initialize_states(500, InitialConditions(0.05, 0.02, 0.02), _rng(17))
    _, log = simulate(net, FULL, op, dis, _rng(18), t_max=30.0)
    assert np.all(np.diff(log.times) > 0)


def test_same_seed_bit_identical_event_log():
    net = _medium_net(19)
    op, dis = initialize_states(500, InitialConditions(0.05, 0.02, 0.02), _rng(20))
    a = simulate(net, FULL, op, dis, _rng(21), t_max=30.0)[1]
    b = simulate(net, FULL, op, dis, _rng(21), t_max=30.0)[1]
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.nodes, b.nodes)
    assert np.array_equal(a.kinds, b.kinds)
    assert a.csv_bytes() == b.csv_bytes()


def test_neutral_alpha_matches_plain_sir_ensemble():
    # with neutral influence the disease marginal equals plain SIR on the
    # phy layer alone; compare ensemble final sizes of the full engine vs the
    # stripped disease-only engine on a fixed network
    rng = _rng(22)
    phy = build_configuration_layer(np.full(400, 5), rng)
    info = build_configuration_layer(np.full(400, 5), rng)
    net = couple_layers(info, phy, None, rng)
    full = Params(beta_pro=0.8, beta_anti=0.8, gamma_pro=0.5, gamma_anti=0.5,
                  tau=0.7, beta_phy=0.6, gamma_phy=1.0)
    bare = Params(beta_phy=0.6, gamma_phy=1.0)
    init = InitialConditions(0.02, 0.05, 0.05)
    init_bare = InitialConditions(0.02, 0.0, 0.0)
    n_runs = 1500
    fs_full, fs_bare = [], []
    for k in range(n_runs):
        op, dis = initialize_states(400, init, _rng(23, k))
        traj, _ = simulate(net, full, op, dis, _rng(24, k), t_max=60.0)
        fs_full.append(traj.ever_infected_fraction())
        op, dis = initialize_states(400, init_bare, _rng(23, k))
        traj, _ = simulate(net, bare, op, dis, _rng(24, k), t_max=60.0)
        fs_bare.append(traj.ever_infected_fraction())
    m1, m2 = np.mean(fs_full), np.mean(fs_bare)
    se = np.sqrt(np.var(fs_full) / n_runs + np.var(fs_bare) / n_runs)
    assert abs(m1 - m2) < 4 * se + 1e-12


def test_trajectory_grid_alignment():
    net = multiplex_from_edges(2, [], [(0, 1)])
    p = Params(beta_phy=0.6, gamma_phy=1.0)
    op = np.array([0, 0], dtype=np.int8)
    dis = np.array([1, 0], dtype=np.int8)
    traj, _ = simulate(net, p, op, dis, _rng(25), t_max=5.0, sample_dt=0.5)
    assert len(traj.times) == 11
    assert traj.times[0] == 0.0 and traj.times[-1] == 5.0
    assert traj.counts[0, 1] == 1  # UI at t=0
