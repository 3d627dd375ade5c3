"""Event-driven simulation and the statistics derived from its event log."""

import numpy as np

from cospread.analysis import (
    opinion_at_infection_decomposition,
    opinion_history_stats,
    trajectory_summary,
)
from cospread.contagion import InitialConditions, Params
from cospread.gillespie import initialize_states, simulate
from cospread.networks import (
    DegreeDistribution,
    build_configuration_layer,
    couple_layers,
    sample_degree_sequence,
)

rng = np.random.default_rng(7)
n = 5000
dist = DegreeDistribution.poisson(5)
info = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
phy = build_configuration_layer(sample_degree_sequence(dist, n, rng), rng)
net = couple_layers(info, phy, None, rng)

params = Params.from_dict(dict(beta_info=0.6, gamma_info=0.5,
                               beta_phy=0.6, gamma_phy=1.0,
                               alpha_pro=0.1, alpha_anti=10.0))
op0, dis0 = initialize_states(n, InitialConditions(0.01, 0.005, 0.005), rng)
traj, log = simulate(net, params, op0, dis0, rng, t_max=60.0)

s = trajectory_summary(traj)
print(f"one run on Poisson(5) layers, n = {n}")
print(f"  events: {len(log.times)}, disease extinct at t = {traj.t_end:.2f}")
print(f"  final size {s.final_epidemic_size:.4f}, "
      f"peak {s.peak_prevalence:.4f} at t = {s.peak_time:.1f}")

deco = opinion_at_infection_decomposition(log, net)
print("  opinion state at the moment of infection:")
for label, frac in deco.fractions.items():
    print(f"    {label}: {frac:.4f}")

print("  opinion history:", opinion_history_stats(log))
