"""Temporary opinion immunity: how the immunity-loss rate reshapes outcomes.

Small ensembles per (recovery rate, immunity loss rate) pair, reporting the
final epidemic size and the fraction of people who held both opinions.
"""

import numpy as np

from cospread.analysis import opinion_history_stats
from cospread.contagion import InitialConditions, Params
from cospread.gillespie import initialize_states, simulate
from cospread.networks import (
    DegreeDistribution,
    build_configuration_layer,
    couple_layers,
    sample_degree_sequence,
)

n = 3000
n_runs = 20
dist = DegreeDistribution.poisson(5)
init = InitialConditions(0.01, 0.005, 0.005)

print(f"{n_runs}-run ensembles, n = {n}, fast opinion spread (rate 2.0)")
print("gamma_info  tau   final_size  frac_both_opinions")
for gamma_info in (0.2, 2.0):
    for tau in (0.0, 1.0, 2.0):
        params = Params.from_dict(dict(beta_info=2.0, gamma_info=gamma_info,
                                       beta_phy=0.6, gamma_phy=1.0,
                                       alpha_pro=0.1, alpha_anti=10.0, tau=tau))
        finals, boths = [], []
        for k in range(n_runs):
            rng = np.random.default_rng(np.random.SeedSequence((50, int(10 * gamma_info),
                                                                int(10 * tau), k)))
            info = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
            phy = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
            net = couple_layers(info, phy, None, rng)
            op0, dis0 = initialize_states(n, init, rng)
            traj, log = simulate(net, params, op0, dis0, rng, t_max=60.0)
            finals.append(traj.ever_infected_fraction())
            boths.append(opinion_history_stats(log)["frac_both_opinions"])
        print(f"   {gamma_info:4.1f}   {tau:4.1f}   {np.mean(finals):9.4f}"
              f"   {np.mean(boths):9.4f}")
