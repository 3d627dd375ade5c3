"""Command-line entry points: run scenarios, validate configs, export networks."""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigurationError
from .harness import export_network, run_scenario, validate_config


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cospread",
                                     description="Coupled opinion-disease spreading "
                                                 "on two-layer multiplex networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--threads", type=int, default=None,
                       help="worker threads for ensemble runs (default: all cores)")
    p_run.add_argument("--ensemble", type=int, default=None,
                       help="override the config ensemble size")

    p_val = sub.add_parser("validate", help="parse and validate a scenario config")
    p_val.add_argument("config")

    p_exp = sub.add_parser("export-network", help="export one network realization")
    p_exp.add_argument("config")
    p_exp.add_argument("--out", required=True, help="output edge-list file")
    p_exp.add_argument("--seed", type=int, default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
            out = run_scenario(args.config, args.out, seed=args.seed,
                               threads=threads, ensemble=args.ensemble)
            print(f"wrote {out}")
        elif args.command == "validate":
            scenario = validate_config(args.config)
            print(f"ok: scenario '{scenario.name}' "
                  f"(model={scenario.model}, n={scenario.n_nodes}, "
                  f"ensemble={scenario.ensemble_size})")
        else:
            out = export_network(args.config, args.out, seed=args.seed)
            print(f"wrote {out}")
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
