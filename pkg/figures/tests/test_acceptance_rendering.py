"""Acceptance: the shipped fig4, fig6a, and fig7 configs produce CSVs that
render without error, and rendering is deterministic across invocations.

The primary toolkit is consumed only through its command line and file
formats; simulation ensembles are shrunk with the CLI's --ensemble override
to keep the run short (the CSV schemas are unaffected).
"""

import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from cospread_figures.render import render_spec_file

REPO = Path(__file__).resolve().parents[2]
CONFIGS = REPO / "configs"


def _run_primary(config, out_dir, extra=()):
    cmd = [sys.executable, "-m", "cospread.cli", "run", str(config),
           "--out", str(out_dir), "--threads", "2", *extra]
    r = subprocess.run(cmd, capture_output=True, text=True)
    assert r.returncode == 0, r.stderr


@pytest.fixture(scope="module")
def harness_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("harness")
    _run_primary(CONFIGS / "fig4.yaml", out, ("--ensemble", "2"))
    _run_primary(CONFIGS / "fig6a.yaml", out, ("--ensemble", "2"))
    _run_primary(CONFIGS / "fig7.yaml", out)
    return out


def test_acceptance_10_render_shipped_configs(harness_outputs, tmp_path):
    spec = {
        "base_dir": str(harness_outputs),
        "figures": [
            {"kind": "trajectory",
             "inputs": ["fig4/sim/point-000/mean_trajectory.csv",
                        "fig4/pa_mixed/point-000/pa_trajectory.csv",
                        "fig4/pa_density/point-000/pa_trajectory.csv",
                        "fig4/pa_neighborhood/point-000/pa_trajectory.csv"],
             "labels": ["simulation", "mixed", "density", "neighborhood"],
             "columns": ["I"], "ylabel": "infectious fraction",
             "output": "fig4.svg"},
            {"kind": "sweep_lines",
             "inputs": ["fig6a/regular/sweep_summary.csv",
                        "fig6a/poisson/sweep_summary.csv",
                        "fig6a/power_law/sweep_summary.csv"],
             "labels": ["regular", "poisson", "power law"],
             "x": "params.gamma_info", "basic": "basic_size",
             "ylabel": "final epidemic size", "output": "fig6a.svg"},
            {"kind": "heatmap",
             "input": "fig7/main/sweep_summary.csv",
             "x": "params.gamma_info", "y": "params.beta_info",
             "subtract": "basic_size", "output": "fig7.svg"},
        ],
    }
    spec_path = tmp_path / "figures.yaml"
    spec_path.write_text(yaml.safe_dump(spec))
    first = render_spec_file(spec_path, tmp_path / "imgs1")
    second = render_spec_file(spec_path, tmp_path / "imgs2")
    ok = True
    for p1, p2 in zip(first, second):
        assert p1.exists() and p1.stat().st_size > 0
        ok &= p1.read_bytes() == p2.read_bytes()
    print(f"\nACCEPTANCE 10: {'PASS' if ok else 'FAIL'} "
          f"(3 figures rendered, deterministic: {ok})")
    assert ok
