"""Scenario execution: ensembles, sweeps, aggregation, and CSV outputs.

Output layout for a config with variants V and sweep points P:

    <out>/<scenario-name>/metadata.json
    <out>/<scenario-name>/<variant>/sweep_summary.csv
    <out>/<scenario-name>/<variant>/point-<i>/mean_trajectory.csv   (gillespie)
    <out>/<scenario-name>/<variant>/point-<i>/summary.csv
    <out>/<scenario-name>/<variant>/point-<i>/decomposition.csv
    <out>/<scenario-name>/<variant>/point-<i>/history_stats.csv
    <out>/<scenario-name>/<variant>/point-<i>/pa_trajectory.csv     (pair_approx)
    <out>/<scenario-name>/<variant>/point-<i>/fm_trajectory.csv     (fully_mixed)
    <out>/<scenario-name>/<variant>/point-<i>/run-<k>/...           (opt-in per-run files)

Everything is reproducible: per-run random streams derive from
(seed, variant index, point index, run index) through a seed sequence, and
aggregation reduces runs in index order, so identical configs give
byte-identical CSV files.
"""

from __future__ import annotations

import hashlib
import json
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    OPINION_LABELS,
    opinion_at_infection_decomposition,
    opinion_history_stats,
    trajectory_summary,
)
from .contagion import COMPARTMENTS, InitialConditions
from .errors import ConfigurationError
from .gillespie import initialize_states, simulate
from .meanfield import BetaHatScheme, FullyMixedModel, PairApproximation
from .scenario import build_scenario, load_config, resolve_point, sweep_grid, variants_of


def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _run_seed(scenario, variant_idx, point_idx, run_idx):
    return np.random.SeedSequence((scenario.seed, variant_idx, point_idx, run_idx))


@dataclass
class RunResult:
    final_size: float
    peak_prevalence: float
    peak_time: float
    t_end: float
    extinct: bool
    n_events: int
    fractions: np.ndarray        # trajectory fractions (n_samples, 12)
    decomposition: dict
    decomposition_by_type: dict
    history: dict
    erased_info: int
    erased_phy: int


def _one_gillespie_run(scenario, variant_idx, point_idx, run_idx, out_dir=None,
                       neutral=False):
    """One ensemble member: fresh network, fresh initial states, one sample path.

    ``neutral=True`` computes the basic-size twin: influence coefficients are
    set to 1 and the opinion dynamics (which then cannot affect the disease)
    are stripped entirely, so the disease process consumes an identical random
    stream no matter what the opinion parameters are.
    """
    rng = np.random.default_rng(_run_seed(scenario, variant_idx, point_idx, run_idx))
    net = scenario.network.realize(scenario.n_nodes, rng)
    params = scenario.params
    init = scenario.init
    if neutral:
        d = params.neutralized().to_dict()
        d.update(beta_pro=0.0, beta_anti=0.0, gamma_pro=0.0, gamma_anti=0.0, tau=0.0)
        params = type(params)(**d)
        init = InitialConditions(i0=init.i0, a0=0.0, p0=0.0)
    op0, dis0 = initialize_states(scenario.n_nodes, init, rng)
    traj, log = simulate(net, params, op0, dis0, rng,
                         t_max=scenario.t_max, sample_dt=scenario.sample_dt)
    summary = trajectory_summary(traj)
    by_type = scenario.outputs.get("decompose_by_type", False)
    deco = opinion_at_infection_decomposition(log, net if by_type else None)
    hist = opinion_history_stats(log)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        if scenario.outputs.get("save_run_trajectories"):
            with open(out_dir / "trajectory.csv", "w", encoding="utf-8", newline="\n") as fh:
                traj.write_csv(fh)
        if scenario.outputs.get("save_run_events"):
            with open(out_dir / "events.csv", "w", encoding="utf-8", newline="\n") as fh:
                log.write_csv(fh)
    return RunResult(summary.final_epidemic_size, summary.peak_prevalence,
                     summary.peak_time, traj.t_end, traj.extinct, len(log.times),
                     traj.fractions(), deco.fractions, deco.by_type, hist,
                     net.meta.get("info_erased", 0), net.meta.get("phy_erased", 0))


def _sem(values):
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return 0.0
    return float(v.std(ddof=1) / np.sqrt(len(v)))


def _run_gillespie_point(scenario, variant_idx, point_idx, point_dir, threads):
    runs = list(range(scenario.ensemble_size))

    def work(k):
        rd = point_dir / f"run-{k:03d}" if (
            scenario.outputs.get("save_run_trajectories")
            or scenario.outputs.get("save_run_events")) else None
        return _one_gillespie_run(scenario, variant_idx, point_idx, k, rd)

    if threads > 1 and len(runs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, runs))
    else:
        results = [work(k) for k in runs]

    basic = None
    if scenario.outputs.get("report_basic_size"):
        def work_basic(k):
            return _one_gillespie_run(scenario, variant_idx, point_idx, k, None,
                                      neutral=True)
        if threads > 1 and len(runs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                basic = list(ex.map(work_basic, runs))
        else:
            basic = [work_basic(k) for k in runs]

    mean_traj = np.mean([r.fractions for r in results], axis=0)
    times = np.arange(mean_traj.shape[0]) * scenario.sample_dt
    _write_csv(point_dir / "mean_trajectory.csv", ("t",) + COMPARTMENTS,
               ([_fmt(t)] + [_fmt(v) for v in row] for t, row in zip(times, mean_traj)))

    header = ["run", "final_size", "peak_prevalence", "peak_time", "t_end",
              "extinct", "n_events", "erased_info", "erased_phy"]
    if basic is not None:
        header.append("basic_size")
    rows = []
    for k, r in enumerate(results):
        row = [str(k), _fmt(r.final_size), _fmt(r.peak_prevalence), _fmt(r.peak_time),
               _fmt(r.t_end), str(int(r.extinct)), str(r.n_events),
               str(r.erased_info), str(r.erased_phy)]
        if basic is not None:
            row.append(_fmt(basic[k].final_size))
        rows.append(row)
    _write_csv(point_dir / "summary.csv", header, rows)

    deco_rows = []
    for lab in OPINION_LABELS:
        vals = [r.decomposition.get(lab, 0.0) for r in results if r.decomposition]
        deco_rows.append([lab, _fmt(np.mean(vals) if vals else 0.0),
                          _fmt(_sem(vals) if vals else 0.0)])
    _write_csv(point_dir / "decomposition.csv", ["subpopulation", "fraction", "sem"],
               deco_rows)
    if scenario.outputs.get("decompose_by_type"):
        keys = sorted({k for r in results for k in r.decomposition_by_type})
        rows = []
        for (ki, kp) in keys:
            for lab in OPINION_LABELS:
                vals = [r.decomposition_by_type.get((ki, kp), {}).get(lab, 0.0)
                        for r in results]
                rows.append([str(ki), str(kp), lab, _fmt(np.mean(vals))])
        _write_csv(point_dir / "decomposition_by_type.csv",
                   ["k_info", "k_phy", "subpopulation", "fraction"], rows)

    hist_keys = list(results[0].history)
    _write_csv(point_dir / "history_stats.csv", ["statistic", "value", "sem"],
               ([k, _fmt(np.mean([r.history[k] for r in results])),
                 _fmt(_sem([r.history[k] for r in results]))] for k in hist_keys))

    final_sizes = [r.final_size for r in results]
    point = {
        "final_size": float(np.mean(final_sizes)),
        "final_size_sem": _sem(final_sizes),
        "peak_prevalence": float(np.mean([r.peak_prevalence for r in results])),
        "peak_time": float(np.mean([r.peak_time for r in results])),
        "basic_size": float(np.mean([b.final_size for b in basic])) if basic else None,
        "meta": {
            "erased_info_mean": float(np.mean([r.erased_info for r in results])),
            "erased_phy_mean": float(np.mean([r.erased_phy for r in results])),
            "n_events_total": int(sum(r.n_events for r in results)),
        },
    }
    return point


def _run_meanfield_point(scenario, point_dir):
    if scenario.model == "fully_mixed":
        model = FullyMixedModel(scenario.params)
        res = model.run(scenario.init, t_end=scenario.t_max, rel_tol=scenario.rel_tol,
                        abs_tol=scenario.abs_tol, sample_dt=scenario.sample_dt)
        with open(point_dir / "fm_trajectory.csv", "w", encoding="utf-8",
                  newline="\n") as fh:
            res.write_csv(fh)
        basic = None
        if scenario.outputs.get("report_basic_size"):
            basic = FullyMixedModel(scenario.params.neutralized()).run(
                scenario.init, t_end=scenario.t_max, rel_tol=scenario.rel_tol,
                abs_tol=scenario.abs_tol, sample_dt=scenario.sample_dt).final_size
        return {"final_size": res.final_size, "final_size_sem": 0.0,
                "peak_prevalence": res.peak_prevalence, "peak_time": res.peak_time,
                "basic_size": basic, "meta": {}}

    net = scenario.network
    pa = PairApproximation(net.info.mixing_or_uncorrelated(),
                           net.phy.mixing_or_uncorrelated(),
                           scenario.params, BetaHatScheme(scenario.beta_hat_scheme),
                           coupling=net.coupling)
    keep = bool(scenario.outputs.get("save_full_state"))
    res = pa.run(scenario.init, t_end=scenario.t_max, rel_tol=scenario.rel_tol,
                 abs_tol=scenario.abs_tol, sample_dt=scenario.sample_dt,
                 keep_states=keep)
    with open(point_dir / "pa_trajectory.csv", "w", encoding="utf-8", newline="\n") as fh:
        res.write_csv(fh)
    if keep:
        with open(point_dir / "pa_full_state.csv", "w", encoding="utf-8",
                  newline="\n") as fh:
            res.write_full_state_csv(fh)
    basic = None
    if scenario.outputs.get("report_basic_size"):
        pab = PairApproximation(net.info.mixing_or_uncorrelated(),
                                net.phy.mixing_or_uncorrelated(),
                                scenario.params.neutralized(),
                                BetaHatScheme(scenario.beta_hat_scheme),
                                coupling=net.coupling)
        basic = pab.run(scenario.init, t_end=scenario.t_max, rel_tol=scenario.rel_tol,
                        abs_tol=scenario.abs_tol,
                        sample_dt=scenario.sample_dt).final_size
    return {"final_size": res.final_size, "final_size_sem": 0.0,
            "peak_prevalence": res.peak_prevalence, "peak_time": res.peak_time,
            "basic_size": basic,
            "meta": {"beta_hat_min": res.telemetry.min_value,
                     "beta_hat_max": res.telemetry.max_value,
                     "beta_hat_fallbacks": res.telemetry.n_fallback,
                     "max_clamp": res.max_clamp,
                     "conservation_error": res.conservation_error()}}


def run_scenario(config, out_dir, seed=None, threads=None, ensemble=None):
    """Execute a scenario config (path or mapping); returns the scenario directory."""
    if isinstance(config, (str, Path)):
        cfg = load_config(config)
        raw_bytes = Path(config).read_bytes()
    else:
        cfg = dict(config)
        raw_bytes = json.dumps(cfg, sort_keys=True, default=str).encode()
    if seed is not None:
        cfg["seed"] = int(seed)
    if ensemble is not None:
        cfg["ensemble_size"] = int(ensemble)
    threads = threads or 1

    base = build_scenario(cfg)  # validate the base config before any work
    out_root = Path(out_dir) / base.name
    out_root.mkdir(parents=True, exist_ok=True)

    sweep_points = []
    for variant_idx, (vname, overrides) in enumerate(variants_of(cfg)):
        vcfg = resolve_point(cfg, overrides)
        vcfg["sweep"] = cfg.get("sweep")
        vdir = out_root / (vname or "main")
        vdir.mkdir(parents=True, exist_ok=True)
        rows = []
        axis_names = []
        for point_idx, axis_values, pcfg in sweep_grid(vcfg):
            scenario = build_scenario(pcfg, name=base.name)
            point_dir = vdir / f"point-{point_idx:03d}"
            point_dir.mkdir(parents=True, exist_ok=True)
            if scenario.model == "gillespie":
                point = _run_gillespie_point(scenario, variant_idx, point_idx,
                                             point_dir, threads)
            else:
                point = _run_meanfield_point(scenario, point_dir)
            axis_names = list(axis_values)
            row = [str(point_idx)] + [_fmt(axis_values[a]) for a in axis_values]
            row += [_fmt(point["final_size"]), _fmt(point["final_size_sem"]),
                    _fmt(point["peak_prevalence"]), _fmt(point["peak_time"]),
                    _fmt(point["basic_size"]) if point["basic_size"] is not None else ""]
            rows.append(row)
            sweep_points.append({"variant": vname or "main", "point": point_idx,
                                 "axes": axis_values, **{
                                     k: v for k, v in point.items() if k != "meta"},
                                 "meta": point["meta"]})
        header = ["point"] + axis_names + ["final_size", "final_size_sem",
                                           "peak_prevalence", "peak_time", "basic_size"]
        _write_csv(vdir / "sweep_summary.csv", header, rows)

    meta = {
        "config_sha256": hashlib.sha256(raw_bytes).hexdigest(),
        "seed": int(cfg.get("seed", 0)),
        "cospread_version": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
        "points": sweep_points,
    }
    with open(out_root / "metadata.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return out_root


def validate_config(config_path):
    """Parse and validate a config, including variants and sweep axes."""
    cfg = load_config(config_path)
    base = build_scenario(cfg)
    for _vname, overrides in variants_of(cfg):
        vcfg = resolve_point(cfg, overrides)
        vcfg["sweep"] = cfg.get("sweep")
        for _ in sweep_grid(vcfg):
            pass
    return base


def export_network(config_path, out_path, seed=None):
    """Draw one network realization from the config and export the edge list."""
    cfg = load_config(config_path)
    if seed is not None:
        cfg["seed"] = int(seed)
    scenario = build_scenario(cfg)
    rng = np.random.default_rng(np.random.SeedSequence((scenario.seed, 0, 0, 0)))
    net = scenario.network.realize(scenario.n_nodes, rng)
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        net.export_edge_list(fh)
    return out_path
