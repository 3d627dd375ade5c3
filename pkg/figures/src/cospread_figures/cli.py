"""Command-line entry: render a figure-spec file into an output directory."""

from __future__ import annotations

import argparse
import sys

from .render import RenderError, render_spec_file


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cospread-figures",
                                     description="Render figures from cospread CSVs")
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render every figure in a spec file")
    p_render.add_argument("spec", help="YAML figure-spec file")
    p_render.add_argument("--out", required=True, help="output directory for images")
    args = parser.parse_args(argv)
    try:
        written = render_spec_file(args.spec, args.out)
    except RenderError as e:
        print(f"render error: {e}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
