"""Render figures from cospread harness CSV outputs.

Four figure kinds cover the toolkit's result files:

* ``trajectory``: curves over time from 13-column compartment trajectories
  (``mean_trajectory.csv`` / ``pa_trajectory.csv``), one labeled curve per
  input file.
* ``sweep_lines``: a quantity against a sweep axis from ``sweep_summary.csv``
  files, with an optional dashed reference column (basic size).
* ``heatmap``: a two-axis sweep as a matrix; subtracting a reference column
  switches to a symmetric diverging scale centered at zero.
* ``decomposition``: the four opinion-at-infection fractions against a sweep
  axis, from per-point ``decomposition.csv`` files.

Rendering is deterministic: fixed SVG hash salt and no timestamp metadata.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import yaml  # noqa: E402

plt.rcParams["svg.hashsalt"] = "cospread-figures"

KINDS = ("trajectory", "sweep_lines", "heatmap", "decomposition")

#: aggregates over the 13-column compartment layout
TRAJECTORY_COLUMNS = ("US", "UI", "UR", "PS", "PI", "PR", "AS", "AI", "AR",
                      "RS", "RI", "RR")
AGGREGATES = {
    "I": ("UI", "PI", "AI", "RI"),
    "S": ("US", "PS", "AS", "RS"),
    "R_phy": ("UR", "PR", "AR", "RR"),
    "U": ("US", "UI", "UR"),
    "P": ("PS", "PI", "PR"),
    "A": ("AS", "AI", "AR"),
    "R_info": ("RS", "RI", "RR"),
}


class RenderError(ValueError):
    """A figure spec references missing files or columns."""


def read_csv_columns(path):
    """CSV as a mapping column name -> list of raw strings."""
    path = Path(path)
    if not path.exists():
        raise RenderError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for k, v in row.items():
                cols[k].append(v)
    if not cols:
        raise RenderError(f"input CSV has no header: {path}")
    return cols


def _floats(cols, name, path, expected=None):
    if name not in cols:
        exp = expected or sorted(cols)
        raise RenderError(f"{path}: missing column '{name}' (expected one of {exp})")
    try:
        return np.array([float(v) for v in cols[name] if v != ""])
    except ValueError as e:
        raise RenderError(f"{path}: column '{name}' is not numeric: {e}") from None


def _series(cols, name, path):
    """A named column or one of the compartment aggregates."""
    if name in AGGREGATES:
        missing = [c for c in AGGREGATES[name] if c not in cols]
        if missing:
            raise RenderError(f"{path}: missing columns {missing} for aggregate "
                              f"'{name}' (expected {list(TRAJECTORY_COLUMNS)})")
        return np.sum([_floats(cols, c, path) for c in AGGREGATES[name]], axis=0)
    return _floats(cols, name, path, expected=list(TRAJECTORY_COLUMNS))


def _save(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    suffix = out_path.suffix.lower()
    if suffix == ".svg":
        metadata = {"Date": None}
    elif suffix == ".pdf":
        metadata = {"CreationDate": None}
    else:
        metadata = None
    fig.savefig(out_path, metadata=metadata)
    plt.close(fig)
    return out_path


def render_trajectory(spec, base):
    inputs = spec.get("inputs") or [spec["input"]]
    labels = spec.get("labels") or [Path(p).parent.name or Path(p).stem for p in inputs]
    columns = spec.get("columns", ["I"])
    fig, ax = plt.subplots(figsize=(6, 4))
    for path, label in zip(inputs, labels):
        cols = read_csv_columns(base / path)
        t = _floats(cols, "t", path)
        for name in columns:
            y = _series(cols, name, path)
            suffix = f" {name}" if len(columns) > 1 else ""
            ax.plot(t, y, label=f"{label}{suffix}")
    ax.set_xlabel(spec.get("xlabel", "t"))
    ax.set_ylabel(spec.get("ylabel", ", ".join(columns)))
    if spec.get("title"):
        ax.set_title(spec["title"])
    ax.legend(frameon=False)
    return fig


def render_sweep_lines(spec, base):
    inputs = spec.get("inputs") or [spec["input"]]
    labels = spec.get("labels") or [Path(p).parent.name or Path(p).stem for p in inputs]
    x_name = spec["x"]
    y_name = spec.get("y", "final_size")
    basic_name = spec.get("basic")
    fig, ax = plt.subplots(figsize=(6, 4))
    for path, label in zip(inputs, labels):
        cols = read_csv_columns(base / path)
        x = _floats(cols, x_name, path)
        y = _floats(cols, y_name, path)
        line, = ax.plot(x, y, marker="o", label=label)
        if basic_name and basic_name in cols and any(v != "" for v in cols[basic_name]):
            b = _floats(cols, basic_name, path)
            ax.plot(x, b, linestyle="--", color=line.get_color(),
                    label=f"{label} (basic)")
    ax.set_xlabel(spec.get("xlabel", x_name))
    ax.set_ylabel(spec.get("ylabel", y_name))
    if spec.get("title"):
        ax.set_title(spec["title"])
    ax.legend(frameon=False)
    return fig


def render_heatmap(spec, base):
    path = spec.get("input") or spec["inputs"][0]
    cols = read_csv_columns(base / path)
    x_name, y_name = spec["x"], spec["y"]
    v_name = spec.get("value", "final_size")
    x = _floats(cols, x_name, path)
    y = _floats(cols, y_name, path)
    v = _floats(cols, v_name, path)
    signed = False
    if spec.get("subtract"):
        v = v - _floats(cols, spec["subtract"], path)
        signed = True
    xs = np.unique(x)
    ys = np.unique(y)
    grid = np.full((len(ys), len(xs)), np.nan)
    for xi, yi, vi in zip(x, y, v):
        grid[np.searchsorted(ys, yi), np.searchsorted(xs, xi)] = vi
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    if signed:
        lim = float(np.nanmax(np.abs(grid))) or 1.0
        im = ax.imshow(grid, origin="lower", aspect="auto", cmap="RdBu_r",
                       vmin=-lim, vmax=lim,
                       extent=(xs[0], xs[-1], ys[0], ys[-1]))
    else:
        im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis",
                       extent=(xs[0], xs[-1], ys[0], ys[-1]))
    fig.colorbar(im, ax=ax, label=spec.get("value_label",
                                           v_name if not signed else
                                           f"{v_name} - {spec['subtract']}"))
    ax.set_xlabel(spec.get("xlabel", x_name))
    ax.set_ylabel(spec.get("ylabel", y_name))
    if spec.get("title"):
        ax.set_title(spec["title"])
    return fig


def render_decomposition(spec, base):
    inputs = spec["inputs"]
    axis = spec.get("axis")
    if axis is not None and len(axis) != len(inputs):
        raise RenderError("decomposition: 'axis' must match 'inputs' in length")
    if axis is None:
        axis = list(range(len(inputs)))
    series = {}
    for path in inputs:
        cols = read_csv_columns(base / path)
        for need in ("subpopulation", "fraction"):
            if need not in cols:
                raise RenderError(f"{path}: missing column '{need}' "
                                  f"(expected subpopulation,fraction[,sem])")
        for lab, val in zip(cols["subpopulation"], cols["fraction"]):
            series.setdefault(lab, []).append(float(val))
    fig, ax = plt.subplots(figsize=(6, 4))
    for lab, vals in series.items():
        ax.plot(axis, vals, marker="o", label=lab)
    ax.set_xlabel(spec.get("xlabel", "sweep axis"))
    ax.set_ylabel(spec.get("ylabel", "fraction of the ever-infected"))
    if spec.get("title"):
        ax.set_title(spec["title"])
    ax.legend(frameon=False)
    return fig


_RENDERERS = {
    "trajectory": render_trajectory,
    "sweep_lines": render_sweep_lines,
    "heatmap": render_heatmap,
    "decomposition": render_decomposition,
}


def render_figure(spec, base, out_dir):
    kind = spec.get("kind")
    if kind not in _RENDERERS:
        raise RenderError(f"unknown figure kind '{kind}' (one of {KINDS})")
    if "output" not in spec:
        raise RenderError("figure spec needs an 'output' file name")
    fig = _RENDERERS[kind](spec, Path(base))
    return _save(fig, Path(out_dir) / spec["output"])


def render_spec_file(spec_path, out_dir):
    """Render every figure in a YAML spec file; returns the written paths."""
    spec_path = Path(spec_path)
    with open(spec_path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict) or "figures" not in doc:
        raise RenderError(f"{spec_path}: expected a mapping with a 'figures' list")
    base = Path(doc.get("base_dir", spec_path.parent))
    if not base.is_absolute():
        base = spec_path.parent / base
    written = []
    for spec in doc["figures"]:
        written.append(render_figure(spec, base, out_dir))
    return written
