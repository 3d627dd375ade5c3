"""Exact stochastic simulation of the coupled dynamics on a multiplex network.

Thin wrapper around the compiled event loop in :mod:`cospread._engine`:
prepares initial states, runs one sample path, and packages the sampled
trajectory and the event log (with per-node first-infection records).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .contagion import COMPARTMENTS, TRANSITION_LAYERS, TRANSITION_NAMES, Opinion
from .errors import ConfigurationError

TRAJECTORY_COLUMNS = ("t",) + COMPARTMENTS


def initialize_states(n, init, rng):
    """Assign initial per-node states: exactly round(n * f) nodes per seed class.

    Disease states are drawn first, opinion states second, each uniformly
    without replacement and independently of the other layer, so a node may
    start both infectious and opinionated. Everyone else is (U, S).
    """
    n_i = int(round(n * init.i0))
    n_a = int(round(n * init.a0))
    n_p = int(round(n * init.p0))
    if n_a + n_p > n:
        raise ConfigurationError("initial opinion fractions exceed the population")
    op = np.zeros(n, dtype=np.int8)
    dis = np.zeros(n, dtype=np.int8)
    if n_i:
        dis[rng.choice(n, size=n_i, replace=False)] = 1
    if n_a + n_p:
        chosen = rng.choice(n, size=n_a + n_p, replace=False)
        op[chosen[:n_a]] = Opinion.A
        op[chosen[n_a:]] = Opinion.P
    return op, dis


@dataclass
class Trajectory:
    """Compartment counts on a fixed time grid (counts are piecewise constant).

    After the dynamics terminate, the final counts are carried forward on the
    remaining grid points so ensemble members share a common grid.
    """

    times: np.ndarray
    counts: np.ndarray  # shape (n_samples, 12)
    n_nodes: int
    t_end: float
    extinct: bool

    def fractions(self):
        return self.counts / self.n_nodes

    def infectious(self):
        return self.counts[:, 1::3].sum(axis=1)

    def ever_infected_fraction(self):
        """Final epidemic size: everyone infectious or disease-recovered at the end."""
        last = self.counts[-1]
        return float((last[1::3].sum() + last[2::3].sum()) / self.n_nodes)

    def write_csv(self, fh):
        fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
        for t, row in zip(self.times, self.counts):
            fh.write(f"{float(t)!r}," + ",".join(str(int(c)) for c in row) + "\n")


@dataclass
class EventLog:
    """Ordered event history plus per-node infection/opinion records."""

    times: np.ndarray
    nodes: np.ndarray
    kinds: np.ndarray
    infection_time: np.ndarray      # -1 if never infected
    opinion_at_infection: np.ndarray  # opinion code at the S->I instant, -1 if never
    spells_before_infection: np.ndarray  # opinion spells begun up to infection
    spells_total: np.ndarray        # opinion spells begun over the whole run
    held_pro: np.ndarray
    held_anti: np.ndarray
    n_nodes: int
    t_end: float
    extinct: bool
    meta: dict = field(default_factory=dict)

    def ever_infected(self):
        return self.infection_time >= 0.0

    def layers(self):
        """Layer ('info' or 'phy') on which each logged event happened."""
        return np.array(TRANSITION_LAYERS, dtype=object)[self.kinds]

    def write_csv(self, fh):
        fh.write("t,node,kind\n")
        for t, i, k in zip(self.times, self.nodes, self.kinds):
            fh.write(f"{float(t)!r},{int(i)},{TRANSITION_NAMES[k]}\n")

    def csv_bytes(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue().encode()


def simulate(network, params, op0, dis0, rng, t_max=200.0, sample_dt=0.1,
             stop_at_extinction=True):
    """One statistically exact sample path; returns (Trajectory, EventLog).

    By default the run stops at ``t_max`` or at disease extinction, whichever
    comes first: opinion dynamics beyond extinction cannot change the disease
    statistics. Pass ``stop_at_extinction=False`` to keep sampling the full
    chain to ``t_max`` (needed when opinion marginals at fixed times matter).
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    (grid, ev_t, ev_node, ev_kind, inf_time, op_at_inf, spells_before,
     spells, held_pro, held_anti, t_end, extinct) = _engine.run_sim(
        network.info.indptr, network.info.indices,
        network.phy.indptr, network.phy.indices,
        np.ascontiguousarray(op0, dtype=np.int8),
        np.ascontiguousarray(dis0, dtype=np.int8),
        params.beta_pro, params.beta_anti, params.gamma_pro, params.gamma_anti,
        params.tau, params.beta_phy, params.gamma_phy,
        params.alpha_pro, params.alpha_anti,
        float(t_max), float(sample_dt), bool(stop_at_extinction), rng)
    times = np.arange(grid.shape[0]) * sample_dt
    traj = Trajectory(times, grid, network.n_nodes, t_end, bool(extinct))
    log = EventLog(ev_t, ev_node, ev_kind, inf_time, op_at_inf, spells_before,
                   spells, held_pro, held_anti, network.n_nodes, t_end, bool(extinct))
    return traj, log
