"""Command-line entry point: regenerate one figure from simulation artifacts.

::

    spinchain-figs render --figure fig2 --inputs a.csv b.csv c.csv d.csv \
                          --out figures/ [--stem name] [--formats png,svg]

The inputs are the simulation CLI's CSV artifacts (with their metadata
sidecars alongside); nothing is recomputed here.  Failures print a
machine-readable diagnostic JSON to stderr and exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .artifacts import MetadataMismatch, MissingInput
from .recipes import FIGURE_IDS, RecipeError, build_recipe
from .render import render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinchain-figs", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("render")
    p.add_argument("--figure", required=True, choices=FIGURE_IDS)
    p.add_argument("--inputs", required=True, nargs="+", type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--stem")
    p.add_argument("--formats", default="png,svg")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    formats = tuple(f.strip() for f in args.formats.split(",") if f.strip())
    try:
        recipe = build_recipe(args.figure, args.inputs)
        written = render(recipe, args.out, stem=args.stem, formats=formats)
    except (MissingInput, MetadataMismatch, RecipeError) as exc:
        print(json.dumps({"status": "input-error", "error": type(exc).__name__,
                          "message": str(exc)}), file=sys.stderr)
        return 2
    print(json.dumps({"status": "ok", "files": [str(p) for p in written]}, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
