import numpy as np
import pytest
import yaml

from cospread_figures.render import (
    RenderError,
    render_figure,
    render_spec_file,
)
from cospread_figures.cli import main as cli_main


TRAJ_HEADER = "t,US,UI,UR,PS,PI,PR,AS,AI,AR,RS,RI,RR"


def _write_trajectory(path, n=30, seed=0):
    rng = np.random.default_rng(seed)
    rows = [TRAJ_HEADER]
    vals = rng.random((n, 12))
    vals /= vals.sum(axis=1, keepdims=True)
    for i in range(n):
        rows.append(",".join([repr(i * 0.1)] + [repr(float(v)) for v in vals[i]]))
    path.write_text("\n".join(rows) + "\n")


def _write_sweep(path, two_axes=False):
    if two_axes:
        rows = ["point,params.gamma_info,params.beta_info,final_size,final_size_sem,"
                "peak_prevalence,peak_time,basic_size"]
        k = 0
        for g in (0.5, 1.0, 1.5):
            for b in (0.5, 1.0):
                rows.append(f"{k},{g},{b},{0.5 + 0.1 * g - 0.05 * b},0.01,0.2,3.0,0.55")
                k += 1
    else:
        rows = ["point,params.gamma_info,final_size,final_size_sem,peak_prevalence,"
                "peak_time,basic_size"]
        for k, g in enumerate((0.5, 1.0, 1.5, 2.0)):
            rows.append(f"{k},{g},{0.6 + 0.05 * g},0.01,0.2,3.0,0.65")
    path.write_text("\n".join(rows) + "\n")


def _write_decomposition(path, seed=0):
    rng = np.random.default_rng(seed)
    f = rng.random(4)
    f /= f.sum()
    rows = ["subpopulation,fraction,sem"]
    for lab, v in zip("UPAR", f):
        rows.append(f"{lab},{float(v)!r},0.01")
    path.write_text("\n".join(rows) + "\n")


def test_trajectory_renders(tmp_path):
    _write_trajectory(tmp_path / "a.csv")
    _write_trajectory(tmp_path / "b.csv", seed=1)
    out = render_figure({"kind": "trajectory", "inputs": ["a.csv", "b.csv"],
                         "labels": ["one", "two"], "columns": ["I"],
                         "output": "traj.svg"}, tmp_path, tmp_path)
    assert out.exists() and out.stat().st_size > 0


def test_trajectory_aggregate_columns(tmp_path):
    _write_trajectory(tmp_path / "a.csv")
    out = render_figure({"kind": "trajectory", "input": "a.csv",
                         "columns": ["I", "P", "A", "R_info"],
                         "output": "t.svg"}, tmp_path, tmp_path)
    assert out.exists()


def test_sweep_lines_with_basic_overlay(tmp_path):
    _write_sweep(tmp_path / "s.csv")
    out = render_figure({"kind": "sweep_lines", "input": "s.csv",
                         "x": "params.gamma_info", "basic": "basic_size",
                         "output": "sweep.svg"}, tmp_path, tmp_path)
    assert out.exists()


def test_heatmap_signed_scale(tmp_path):
    _write_sweep(tmp_path / "h.csv", two_axes=True)
    out = render_figure({"kind": "heatmap", "input": "h.csv",
                         "x": "params.gamma_info", "y": "params.beta_info",
                         "subtract": "basic_size", "output": "heat.svg"},
                        tmp_path, tmp_path)
    assert out.exists()


def test_decomposition_renders(tmp_path):
    for i in range(3):
        _write_decomposition(tmp_path / f"d{i}.csv", seed=i)
    out = render_figure({"kind": "decomposition",
                         "inputs": ["d0.csv", "d1.csv", "d2.csv"],
                         "axis": [0.1, 0.5, 1.0], "output": "dec.pdf"},
                        tmp_path, tmp_path)
    assert out.exists()


def test_missing_file_names_file(tmp_path):
    with pytest.raises(RenderError, match="nope.csv"):
        render_figure({"kind": "trajectory", "input": "nope.csv",
                       "output": "x.svg"}, tmp_path, tmp_path)


def test_missing_column_names_expectations(tmp_path):
    (tmp_path / "bad.csv").write_text("t,US\n0.0,1.0\n")
    with pytest.raises(RenderError, match="UI"):
        render_figure({"kind": "trajectory", "input": "bad.csv",
                       "columns": ["I"], "output": "x.svg"}, tmp_path, tmp_path)


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(RenderError, match="unknown figure kind"):
        render_figure({"kind": "pie", "input": "a.csv", "output": "x.svg"},
                      tmp_path, tmp_path)


def test_spec_file_and_cli_deterministic(tmp_path):
    _write_trajectory(tmp_path / "a.csv")
    _write_sweep(tmp_path / "s.csv")
    spec = {"figures": [
        {"kind": "trajectory", "input": "a.csv", "columns": ["I"],
         "output": "one.svg"},
        {"kind": "sweep_lines", "input": "s.csv", "x": "params.gamma_info",
         "basic": "basic_size", "output": "two.svg"},
    ]}
    spec_path = tmp_path / "spec.yaml"
    spec_path.write_text(yaml.safe_dump(spec))
    out1 = render_spec_file(spec_path, tmp_path / "r1")
    assert cli_main(["render", str(spec_path), "--out", str(tmp_path / "r2")]) == 0
    for p1 in out1:
        p2 = tmp_path / "r2" / p1.name
        assert p1.read_bytes() == p2.read_bytes()


def test_cli_reports_render_errors(tmp_path):
    spec_path = tmp_path / "spec.yaml"
    spec_path.write_text(yaml.safe_dump({"figures": [
        {"kind": "trajectory", "input": "missing.csv", "output": "x.svg"}]}))
    assert cli_main(["render", str(spec_path), "--out", str(tmp_path)]) == 2
