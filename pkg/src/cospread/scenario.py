"""Scenario configuration: parsing, validation, variants, and sweep grids.

A scenario is a YAML mapping with scalar run settings, a ``params`` table, an
``init`` table, a ``network`` table (per-layer degree distribution, optional
intra-layer correlation, optional inter-layer coupling), optional ``variants``
(named override sets compared side by side), and up to two ``sweep`` axes
whose parameters are dotted paths into the configuration.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field

import numpy as np
import yaml

from .contagion import InitialConditions, Params
from .errors import ConfigurationError
from .networks import (
    DegreeDistribution,
    InterLayerCoupling,
    MixingMatrix,
    apportion,
    build_configuration_layer,
    build_correlated_layer,
    couple_layers,
    sample_degree_sequence,
    two_point_a_for_assortativity,
    two_point_a_for_inter_pearson,
    two_point_inter_matrix,
    two_point_mixing_matrix,
)

MODELS = ("gillespie", "pair_approx", "fully_mixed")

_SCALAR_DEFAULTS = {
    "model": "gillespie",
    "seed": 0,
    "ensemble_size": 1,
    "n_nodes": 10000,
    "t_max": 200.0,
    "sample_dt": 0.1,
    "beta_hat_scheme": "neighborhood",
}

_OUTPUT_DEFAULTS = {
    "report_basic_size": False,
    "save_run_trajectories": False,
    "save_run_events": False,
    "save_full_state": False,
    "decompose_by_type": False,
}

_INTEGRATOR_DEFAULTS = {"rel_tol": 1e-8, "abs_tol": 1e-10}


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        cfg = yaml.safe_load(fh)
    if not isinstance(cfg, dict):
        raise ConfigurationError(f"config file {path} must contain a mapping")
    return cfg


def apply_override(cfg, dotted, value):
    """Set a dotted path like ``params.gamma_info`` in a nested mapping."""
    parts = dotted.split(".")
    node = cfg
    for p in parts[:-1]:
        if p not in node or not isinstance(node[p], dict):
            node[p] = {}
        node = node[p]
    node[parts[-1]] = value


def _get(cfg, dotted, default=None):
    node = cfg
    for p in dotted.split("."):
        if not isinstance(node, dict) or p not in node:
            return default
        node = node[p]
    return node


@dataclass
class LayerSpec:
    """Degree structure of one layer; ``assortativity``/``a`` only for two_point."""

    distribution: DegreeDistribution
    mixing: MixingMatrix | None = None  # None: configuration model (uncorrelated)

    def mixing_or_uncorrelated(self):
        return self.mixing if self.mixing is not None else \
            MixingMatrix.uncorrelated(self.distribution)


_LAYER_FIELDS = {
    "regular": {"k"},
    "poisson": {"mean"},
    "truncated_power_law": {"exponent", "cutoff_scale", "max_degree"},
    "two_point": {"k_lo", "k_hi", "p_lo", "r_intra", "a"},
    "explicit": {"table"},
}


def _build_layer_spec(d, where):
    if not isinstance(d, dict) or "distribution" not in d:
        raise ConfigurationError(f"{where}: needs a 'distribution' field")
    kind = d["distribution"]
    if kind in _LAYER_FIELDS:
        unknown = set(d) - _LAYER_FIELDS[kind] - {"distribution"}
        if unknown:
            raise ConfigurationError(f"{where}: unknown fields {sorted(unknown)} for '{kind}'")
    try:
        if kind == "regular":
            dist = DegreeDistribution.regular(int(d["k"]))
        elif kind == "poisson":
            dist = DegreeDistribution.poisson(float(d["mean"]))
        elif kind == "truncated_power_law":
            dist = DegreeDistribution.truncated_power_law(
                float(d["exponent"]), float(d["cutoff_scale"]), int(d["max_degree"]))
        elif kind == "two_point":
            dist = DegreeDistribution.two_point(int(d["k_lo"]), int(d["k_hi"]),
                                                float(d["p_lo"]))
        elif kind == "explicit":
            dist = DegreeDistribution.explicit({int(k): float(v)
                                                for k, v in d["table"].items()})
        else:
            raise ConfigurationError(f"{where}: unknown distribution '{kind}'")
    except KeyError as e:
        raise ConfigurationError(f"{where}: missing field {e} for '{kind}'") from None
    mixing = None
    if "r_intra" in d or "a" in d:
        if kind != "two_point":
            raise ConfigurationError(
                f"{where}: intra-layer correlation control requires a two_point distribution")
        k_lo, k_hi, p_lo = int(d["k_lo"]), int(d["k_hi"]), float(d["p_lo"])
        a = float(d["a"]) if "a" in d else \
            two_point_a_for_assortativity(k_lo, k_hi, p_lo, float(d["r_intra"]))
        try:
            mixing = two_point_mixing_matrix(k_lo, k_hi, p_lo, a)
        except ValueError as e:
            raise ConfigurationError(f"{where}: {e}") from None
    return LayerSpec(dist, mixing)


@dataclass
class NetworkSpec:
    info: LayerSpec
    phy: LayerSpec
    coupling: InterLayerCoupling | None = None  # None: uniformly random pairing

    def realize(self, n, rng):
        """Draw one multiplex realization (fresh graphs per call)."""
        if self.coupling is None:
            info = self._realize_layer(self.info, n, rng, None)
            phy = self._realize_layer(self.phy, n, rng, None)
            return couple_layers(info, phy, None, rng)
        joint = apportion(self.coupling.C.ravel(), n).reshape(self.coupling.C.shape)
        info = self._realize_layer(self.info, n, rng, joint.sum(axis=1))
        phy = self._realize_layer(self.phy, n, rng, joint.sum(axis=0))
        return couple_layers(info, phy, self.coupling, rng)

    @staticmethod
    def _realize_layer(spec, n, rng, class_counts):
        if spec.mixing is not None:
            return build_correlated_layer(spec.mixing, n, rng, node_counts=class_counts)
        if class_counts is None:
            seq = sample_degree_sequence(spec.distribution, n, rng)
        else:
            seq = np.repeat(spec.distribution.degrees, class_counts)
            rng.shuffle(seq)
            if seq.sum() % 2 == 1:
                # flip one node between the two largest classes of opposite parity
                degs = spec.distribution.degrees
                done = False
                for a in range(len(degs)):
                    for b in range(len(degs)):
                        if (degs[a] - degs[b]) % 2 == 1 and np.any(seq == degs[a]):
                            seq[np.argmax(seq == degs[a])] = degs[b]
                            done = True
                            break
                    if done:
                        break
                if not done:
                    raise ConfigurationError("cannot reach an even stub total")
        return build_configuration_layer(seq, rng)


def _build_coupling(d, info_spec, phy_spec):
    if d is None:
        return None
    unknown = set(d) - {"kind", "r_inter", "a"}
    if unknown:
        raise ConfigurationError(f"network.coupling: unknown fields {sorted(unknown)}")
    kind = d.get("kind", "uniform")
    if kind == "uniform":
        if "r_inter" in d or "a" in d:
            raise ConfigurationError(
                "network.coupling: 'r_inter'/'a' require kind: two_point")
        return None
    if kind != "two_point":
        raise ConfigurationError(f"network.coupling: unknown kind '{kind}'")
    for spec, name in ((info_spec, "info"), (phy_spec, "phy")):
        if len(spec.distribution.degrees) != 2:
            raise ConfigurationError(
                f"network.coupling: two_point coupling requires a two-degree {name} layer")
    q1 = float(info_spec.distribution.probs[0])
    q2 = float(phy_spec.distribution.probs[0])
    info_degs = tuple(int(k) for k in info_spec.distribution.degrees)
    phy_degs = tuple(int(k) for k in phy_spec.distribution.degrees)
    if "a" in d:
        a = float(d["a"])
    elif "r_inter" in d:
        a = two_point_a_for_inter_pearson(q1, q2, float(d["r_inter"]),
                                          info_degs, phy_degs)
    else:
        raise ConfigurationError("network.coupling: two_point needs 'r_inter' or 'a'")
    try:
        return two_point_inter_matrix(q1, q2, a, info_degs, phy_degs)
    except ValueError as e:
        raise ConfigurationError(f"network.coupling: {e}") from None


@dataclass
class Scenario:
    """One fully resolved run specification (a single sweep point / variant)."""

    name: str
    model: str
    params: Params
    init: InitialConditions
    network: NetworkSpec
    seed: int
    ensemble_size: int
    n_nodes: int
    t_max: float
    sample_dt: float
    beta_hat_scheme: str
    rel_tol: float
    abs_tol: float
    outputs: dict = field(default_factory=dict)


def build_scenario(cfg, name="scenario"):
    """Validate a (fully overridden) config mapping into a Scenario."""
    known_top = {"name", "model", "seed", "ensemble_size", "n_nodes", "t_max",
                 "sample_dt", "beta_hat_scheme", "params", "init", "network",
                 "outputs", "integrator", "sweep", "variants"}
    unknown = set(cfg) - known_top
    if unknown:
        raise ConfigurationError(f"unknown top-level config fields: {sorted(unknown)}")
    scalars = {k: cfg.get(k, v) for k, v in _SCALAR_DEFAULTS.items()}
    if scalars["model"] not in MODELS:
        raise ConfigurationError(
            f"model must be one of {MODELS}, got '{scalars['model']}'")
    if int(scalars["ensemble_size"]) < 1:
        raise ConfigurationError("ensemble_size must be >= 1")
    params = Params.from_dict(cfg.get("params", {}))
    init = InitialConditions(**{k: float(v) for k, v in cfg.get("init", {}).items()})
    net_cfg = copy.deepcopy(cfg.get("network", {}))
    unknown_net = set(net_cfg) - {"info", "phy", "coupling", "r_intra"}
    if unknown_net:
        raise ConfigurationError(f"network: unknown fields {sorted(unknown_net)}")
    if "r_intra" in net_cfg:
        # shorthand: the same intra-layer correlation in both layers
        r = net_cfg.pop("r_intra")
        for side in ("info", "phy"):
            net_cfg.setdefault(side, {})
            net_cfg[side]["r_intra"] = r
    info_spec = _build_layer_spec(net_cfg.get("info", {"distribution": "regular", "k": 5}),
                                  "network.info")
    phy_spec = _build_layer_spec(net_cfg.get("phy", {"distribution": "regular", "k": 5}),
                                 "network.phy")
    coupling = _build_coupling(net_cfg.get("coupling"), info_spec, phy_spec)
    outputs = dict(_OUTPUT_DEFAULTS)
    outputs.update(cfg.get("outputs", {}) or {})
    integ = dict(_INTEGRATOR_DEFAULTS)
    integ.update(cfg.get("integrator", {}) or {})
    scheme = scalars["beta_hat_scheme"]
    if scheme not in ("mixed", "density", "neighborhood"):
        raise ConfigurationError(f"unknown beta_hat_scheme '{scheme}'")
    return Scenario(
        name=cfg.get("name", name),
        model=scalars["model"],
        params=params,
        init=init,
        network=NetworkSpec(info_spec, phy_spec, coupling),
        seed=int(scalars["seed"]),
        ensemble_size=int(scalars["ensemble_size"]),
        n_nodes=int(scalars["n_nodes"]),
        t_max=float(scalars["t_max"]),
        sample_dt=float(scalars["sample_dt"]),
        beta_hat_scheme=scheme,
        rel_tol=float(integ["rel_tol"]),
        abs_tol=float(integ["abs_tol"]),
        outputs=outputs,
    )


def variants_of(cfg):
    """Named override sets; a config without ``variants`` has one unnamed variant."""
    raw = cfg.get("variants")
    if not raw:
        return [("", {})]
    out = []
    for i, v in enumerate(raw):
        if "name" not in v:
            raise ConfigurationError(f"variants[{i}] needs a 'name'")
        out.append((str(v["name"]), dict(v.get("overrides", {}))))
    if len({n for n, _ in out}) != len(out):
        raise ConfigurationError("variant names must be unique")
    return out


def sweep_axes(cfg):
    raw = cfg.get("sweep") or []
    if len(raw) > 2:
        raise ConfigurationError("at most 2 sweep axes are supported")
    axes = []
    for i, ax in enumerate(raw):
        if "parameter" not in ax or "values" not in ax:
            raise ConfigurationError(f"sweep[{i}] needs 'parameter' and 'values'")
        values = list(ax["values"])
        if not values:
            raise ConfigurationError(f"sweep[{i}] has an empty value list")
        axes.append((str(ax["parameter"]), values))
    # sweep parameters must resolve to something that exists after defaults
    probe = resolve_point(cfg, {p: v[0] for p, v in axes})
    build_scenario(probe)
    return axes


def resolve_point(cfg, overrides):
    out = copy.deepcopy(cfg)
    out.pop("sweep", None)
    out.pop("variants", None)
    for dotted, value in overrides.items():
        apply_override(out, dotted, value)
    return out


def sweep_grid(cfg):
    """Cartesian product of the sweep axes.

    Yields (point_index, axis_values dict, resolved config mapping); a config
    without sweep axes yields the single point 0.
    """
    axes = sweep_axes(cfg)
    if not axes:
        yield 0, {}, resolve_point(cfg, {})
        return
    names = [a[0] for a in axes]
    for idx, combo in enumerate(itertools.product(*(a[1] for a in axes))):
        overrides = dict(zip(names, combo))
        yield idx, overrides, resolve_point(cfg, overrides)
