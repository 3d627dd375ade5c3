"""Derived statistics: outbreak summaries, opinion-at-infection decompositions,
and opinion-history statistics for runs with temporary opinion immunity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contagion import Opinion

OPINION_LABELS = ("U", "P", "A", "R")


@dataclass
class OutbreakSummary:
    final_epidemic_size: float
    peak_prevalence: float
    peak_time: float
    basic_size_reference: float | None = None


def final_epidemic_size(trajectory):
    """Fraction ever infected: infectious plus disease-recovered at termination."""
    return trajectory.ever_infected_fraction()


def trajectory_summary(trajectory):
    i_curve = trajectory.infectious() / trajectory.n_nodes
    peak = int(np.argmax(i_curve))
    return OutbreakSummary(final_epidemic_size(trajectory),
                           float(i_curve[peak]),
                           float(trajectory.times[peak]))


@dataclass
class OpinionDecomposition:
    """Ever-infected nodes classified by opinion state at their infection instant.

    ``fractions`` is normalized over the ever-infected population and so sums
    to 1 when that population is nonempty; empty runs give the sentinel with
    ``n_infected = 0`` and no fractions.
    """

    n_infected: int
    fractions: dict = field(default_factory=dict)
    by_type: dict = field(default_factory=dict)  # (k_info, k_phy) -> label -> fraction

    @property
    def empty(self):
        return self.n_infected == 0


def opinion_at_infection_decomposition(log, network=None):
    """Decompose the ever-infected set by opinion at infection.

    Nodes infectious at time zero count with their initial opinion state.
    With ``network`` given, adds the refinement by node type (requested
    info-degree, phy-degree); the refined fractions sum to the unrefined ones.
    """
    infected = log.ever_infected()
    n_inf = int(infected.sum())
    if n_inf == 0:
        return OpinionDecomposition(0)
    ops = log.opinion_at_infection[infected]
    fractions = {lab: float((ops == code).sum() / n_inf)
                 for code, lab in enumerate(OPINION_LABELS)}
    by_type = {}
    if network is not None:
        ki = network.info.degrees[infected]
        kp = network.phy.degrees[infected]
        for a, b in {(int(x), int(y)) for x, y in zip(ki, kp)}:
            sel = (ki == a) & (kp == b)
            by_type[(a, b)] = {lab: float(((ops == code) & sel).sum() / n_inf)
                               for code, lab in enumerate(OPINION_LABELS)}
    return OpinionDecomposition(n_inf, fractions, by_type)


def opinion_history_stats(log):
    """Population fractions of opinion-history events.

    ``frac_infected_repeat_pro``/``_anti``: infected while holding that
    opinion during a second-or-later opinion spell (the node had returned to
    the uninformed state at least once before adopting again).
    """
    n = log.n_nodes
    at_least_one = float((log.spells_total >= 1).sum() / n)
    both = float(((log.held_pro == 1) & (log.held_anti == 1)).sum() / n)
    infected = log.ever_infected()
    repeat = infected & (log.spells_before_infection >= 2)
    rep_pro = float((repeat & (log.opinion_at_infection == Opinion.P)).sum() / n)
    rep_anti = float((repeat & (log.opinion_at_infection == Opinion.A)).sum() / n)
    return {
        "frac_at_least_one_opinion": at_least_one,
        "frac_both_opinions": both,
        "frac_infected_repeat_pro": rep_pro,
        "frac_infected_repeat_anti": rep_anti,
    }
