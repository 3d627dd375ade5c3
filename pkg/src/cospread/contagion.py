"""Compartments, rate parameters, and per-node transition laws.

Each node carries an opinion state on the information layer and a disease
state on the physical layer, for 12 joint compartments. Opinion transitions
depend only on info-layer neighborhoods; disease transitions depend on
phy-layer neighborhoods plus the node's own opinion (unidirectional coupling).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, asdict
from enum import IntEnum

from .errors import ConfigurationError


class Opinion(IntEnum):
    U = 0  # uninformed
    P = 1  # pro-distancing
    A = 2  # anti-distancing
    R = 3  # recovered from either opinion


class Disease(IntEnum):
    S = 0
    I = 1
    R = 2


#: joint compartment index: opinion * 3 + disease, in CSV column order
COMPARTMENTS = ("US", "UI", "UR", "PS", "PI", "PR", "AS", "AI", "AR", "RS", "RI", "RR")


class Transition(IntEnum):
    U2P = 0
    U2A = 1
    P2R = 2
    A2R = 3
    R2U = 4
    S2I = 5
    I2R = 6


TRANSITION_NAMES = tuple(t.name for t in Transition)

#: which layer each transition belongs to
TRANSITION_LAYERS = ("info", "info", "info", "info", "info", "phy", "phy")

_RATE_FIELDS = ("beta_pro", "beta_anti", "gamma_pro", "gamma_anti", "tau",
                "beta_phy", "gamma_phy", "alpha_pro", "alpha_anti")


@dataclass(frozen=True)
class Params:
    """All rate constants and influence coefficients of the coupled model.

    ``tau`` is the rate at which opinion-recovered nodes become susceptible
    to opinions again; tau = 0 gives permanent mutual immunity. The influence
    coefficients rescale a susceptible node's disease transmission rate;
    alpha_pro <= 1 <= alpha_anti is the intended regime and is enforced as a
    warning only, because neutral settings (alpha = 1) are also in use.
    """

    beta_pro: float = 0.0
    beta_anti: float = 0.0
    gamma_pro: float = 0.0
    gamma_anti: float = 0.0
    tau: float = 0.0
    beta_phy: float = 0.0
    gamma_phy: float = 0.0
    alpha_pro: float = 1.0
    alpha_anti: float = 1.0

    def __post_init__(self):
        for name in _RATE_FIELDS:
            v = getattr(self, name)
            if not (v >= 0.0):
                raise ConfigurationError(f"{name} must be a nonnegative rate, got {v}")
        if self.alpha_pro > 1.0 or self.alpha_anti < 1.0:
            warnings.warn(
                "influence coefficients outside the modeled regime "
                f"(alpha_pro={self.alpha_pro}, alpha_anti={self.alpha_anti}); "
                "expected alpha_pro <= 1 <= alpha_anti",
                stacklevel=2)

    @classmethod
    def from_dict(cls, d):
        """Build from a mapping; ``beta_info``/``gamma_info`` set both opinions."""
        d = dict(d)
        known = set(_RATE_FIELDS) | {"beta_info", "gamma_info"}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown parameter fields: {sorted(unknown)}")
        if "beta_info" in d:
            v = d.pop("beta_info")
            d.setdefault("beta_pro", v)
            d.setdefault("beta_anti", v)
        if "gamma_info" in d:
            v = d.pop("gamma_info")
            d.setdefault("gamma_pro", v)
            d.setdefault("gamma_anti", v)
        return cls(**{k: float(v) for k, v in d.items()})

    def to_dict(self):
        return asdict(self)

    def neutralized(self):
        """Same scenario with opinion influence removed (alpha_pro = alpha_anti = 1)."""
        d = self.to_dict()
        d["alpha_pro"] = 1.0
        d["alpha_anti"] = 1.0
        return Params(**d)


def susceptibility_multiplier(opinion, params):
    """Multiplier on the disease transmission rate of a susceptible node."""
    if opinion == Opinion.P:
        return params.alpha_pro
    if opinion == Opinion.A:
        return params.alpha_anti
    return 1.0


@dataclass(frozen=True)
class InitialConditions:
    """Initial population fractions: infectious, anti-, and pro-distancing."""

    i0: float = 0.0
    a0: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        for name in ("i0", "a0", "p0"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {v}")
        if self.a0 + self.p0 > 1.0:
            raise ConfigurationError("a0 + p0 must not exceed 1 (opinion seeds are disjoint)")


def enabled_transitions(node, network, opinions, diseases, params):
    """Complete event set for one node: list of (Transition, rate).

    Rates aggregate over neighbors: an uninformed node adopts an opinion at
    the per-edge rate times the number of info-neighbors voicing it, and a
    susceptible node is infected at its opinion-scaled rate times the number
    of infectious phy-neighbors.
    """
    out = []
    op = opinions[node]
    dz = diseases[node]
    if op == Opinion.U:
        n_p = n_a = 0
        for j in network.info.neighbors(node):
            if opinions[j] == Opinion.P:
                n_p += 1
            elif opinions[j] == Opinion.A:
                n_a += 1
        if n_p and params.beta_pro > 0:
            out.append((Transition.U2P, params.beta_pro * n_p))
        if n_a and params.beta_anti > 0:
            out.append((Transition.U2A, params.beta_anti * n_a))
    elif op == Opinion.P:
        if params.gamma_pro > 0:
            out.append((Transition.P2R, params.gamma_pro))
    elif op == Opinion.A:
        if params.gamma_anti > 0:
            out.append((Transition.A2R, params.gamma_anti))
    else:
        if params.tau > 0:
            out.append((Transition.R2U, params.tau))
    if dz == Disease.S:
        n_i = sum(1 for j in network.phy.neighbors(node) if diseases[j] == Disease.I)
        if n_i:
            rate = susceptibility_multiplier(op, params) * params.beta_phy * n_i
            if rate > 0:
                out.append((Transition.S2I, rate))
    elif dz == Disease.I:
        if params.gamma_phy > 0:
            out.append((Transition.I2R, params.gamma_phy))
    return out


def apply_transition(kind, opinion, disease):
    """New (opinion, disease) pair after a transition fires."""
    if kind == Transition.U2P:
        return Opinion.P, disease
    if kind == Transition.U2A:
        return Opinion.A, disease
    if kind in (Transition.P2R, Transition.A2R):
        return Opinion.R, disease
    if kind == Transition.R2U:
        return Opinion.U, disease
    if kind == Transition.S2I:
        return opinion, Disease.I
    if kind == Transition.I2R:
        return opinion, Disease.R
    raise ValueError(f"unknown transition {kind}")
