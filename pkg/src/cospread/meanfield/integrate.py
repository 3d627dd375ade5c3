"""Adaptive ODE integration onto a fixed reporting grid.

Backed by scipy's embedded Runge-Kutta 5(4) pair with dense output. Tiny
negative entries produced by the closure dynamics are clamped to zero on the
reported samples; the largest clamped magnitude is recorded so runs can prove
the excursions stayed at integrator-noise level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import IntegrationError


@dataclass
class IntegrationResult:
    times: np.ndarray
    states: np.ndarray          # shape (n_samples, dim), clamped at 0
    stopped_at: float | None    # stop-event time, None if the event never fired
    max_clamp: float


def integrate(rhs, y0, t_end, rel_tol=1e-8, abs_tol=1e-10, sample_dt=0.1,
              stop=None):
    """Integrate y' = rhs(t, y) from 0 to t_end, sampled every ``sample_dt``.

    ``stop``, if given, is a scalar function of (t, y); integration terminates
    the first time it crosses zero from above. Raises IntegrationError when
    the solver cannot proceed (step-size underflow), reporting the time.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    y0 = np.asarray(y0, dtype=float)
    n_grid = int(np.floor(t_end / sample_dt + 1e-9)) + 1
    grid = np.arange(n_grid) * sample_dt
    events = None
    if stop is not None:
        def _event(t, y):
            return stop(t, y)
        _event.terminal = True
        _event.direction = -1
        events = [_event]
    sol = solve_ivp(rhs, (0.0, float(t_end)), y0, method="RK45",
                    rtol=rel_tol, atol=abs_tol, t_eval=grid, events=events)
    if not sol.success and sol.status == -1:
        raise IntegrationError(
            f"integration failed at t={sol.t[-1] if len(sol.t) else 0.0}: {sol.message}",
            t=float(sol.t[-1]) if len(sol.t) else 0.0)
    times = sol.t
    states = sol.y.T
    stopped_at = None
    if events is not None and sol.t_events[0].size:
        stopped_at = float(sol.t_events[0][0])
        times = np.append(times, stopped_at)
        states = np.vstack([states, sol.y_events[0][0]])
    max_clamp = float(max(0.0, -states.min())) if states.size else 0.0
    states = np.maximum(states, 0.0)
    return IntegrationResult(times, states, stopped_at, max_clamp)
