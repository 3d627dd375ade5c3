"""Fully-mixed baseline: seven coupled ODEs with an effective transmission rate.

Ignores all contact structure. Opinion prevalences feed into the disease
block only through the effective rate

    beta_star = ([P] alpha_pro + [A] alpha_anti + 1 - [A] - [P]) * beta_phy,

so with alpha_pro + alpha_anti = 2 and symmetric opinions the disease block
reduces exactly to a standard SIR system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrate import integrate

#: state vector layout
FM_STATE = ("U", "P", "A", "R_info", "S", "I", "R_phy")

#: disease mass below which an outbreak is considered over
EXTINCTION_THRESHOLD = 1e-7


def beta_star(state, params):
    p, a = state[1], state[2]
    return (p * params.alpha_pro + a * params.alpha_anti + 1.0 - a - p) * params.beta_phy


def fully_mixed_rhs(state, params):
    """Derivative of (U, P, A, R_info, S, I, R_phy) population fractions."""
    u, p, a, r_info, s, i, _ = state
    adopt_p = params.beta_pro * u * p
    adopt_a = params.beta_anti * u * a
    infect = beta_star(state, params) * s * i
    return np.array([
        -adopt_p - adopt_a + params.tau * r_info,
        adopt_p - params.gamma_pro * p,
        adopt_a - params.gamma_anti * a,
        params.gamma_pro * p + params.gamma_anti * a - params.tau * r_info,
        -infect,
        infect - params.gamma_phy * i,
        params.gamma_phy * i,
    ])


@dataclass
class FullyMixedResult:
    times: np.ndarray
    states: np.ndarray  # (n_samples, 7)
    final_size: float
    peak_prevalence: float
    peak_time: float
    stopped_at: float | None

    def write_csv(self, fh):
        fh.write("t," + ",".join(FM_STATE) + "\n")
        for t, row in zip(self.times, self.states):
            fh.write(f"{float(t)!r}," + ",".join(repr(float(v)) for v in row) + "\n")


class FullyMixedModel:
    def __init__(self, params):
        self.params = params

    def initial_state(self, init):
        return np.array([1.0 - init.a0 - init.p0, init.p0, init.a0, 0.0,
                         1.0 - init.i0, init.i0, 0.0])

    def run(self, init, t_end=200.0, rel_tol=1e-8, abs_tol=1e-10, sample_dt=0.1):
        y0 = self.initial_state(init)
        res = integrate(lambda _t, y: fully_mixed_rhs(y, self.params), y0, t_end,
                        rel_tol=rel_tol, abs_tol=abs_tol, sample_dt=sample_dt,
                        stop=lambda _t, y: y[5] - EXTINCTION_THRESHOLD)
        i_curve = res.states[:, 5]
        peak_idx = int(np.argmax(i_curve))
        # final epidemic size: disease-recovered mass once the infectious mass
        # has fallen below the extinction threshold (or at t_end)
        final = float(res.states[-1, 6])
        return FullyMixedResult(res.times, res.states, final,
                                float(i_curve[peak_idx]), float(res.times[peak_idx]),
                                res.stopped_at)
