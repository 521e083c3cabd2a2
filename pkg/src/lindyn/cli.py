"""Command line entry point: ``lindyn run | list-families | selftest``.

Exit codes: 0 all verdicts pass, 1 at least one failure, 2 invalid spec.
"""

from __future__ import annotations

import argparse
import json
import sys

from .families import CATALOG
from .runner import SpecError, emit_report, load_specs, run_specs

FAMILY_HELP = {
    "poly_trunc": "T_p x = (a_0 x_0, ..., a_n x_n, 0, ...); params degree, coeff_radius, coeff_spacing",
    "rank_one": "T_x y = (<y,f>/<e,f>) x; params functional, anchor, scale",
    "power": "{T^n : n >= 0}; params base (backward_shift|forward_shift), weight, k_schedule",
    "scalar": "{cI : |c| <= radius}; params radius",
    "diag_exp_group": "S(z) = exp(z Lambda) C; params lambda, c, radius, z_sampler",
}


def _cmd_run(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read spec: {exc}", file=sys.stderr)
        return 2
    try:
        specs = load_specs(text)
        report = run_specs(specs, timed=args.timings)
    except SpecError as exc:
        for msg in exc.errors:
            print(f"error: {msg}", file=sys.stderr)
        return 2
    if args.out:
        emit_report(report, args.out)
    else:
        for rec in report.records:
            print(json.dumps(rec, separators=(",", ":")))
    return 0 if report.all_pass else 1


def _cmd_list(args) -> int:
    for name in CATALOG:
        print(f"{name:16s} {FAMILY_HELP[name]}")
    return 0


def _cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(include_cli_selftest=False)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lindyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run an experiment spec (JSON object or list)")
    p.add_argument("spec")
    p.add_argument("--out", help="write JSON-lines report here instead of stdout")
    p.add_argument("--timings", action="store_true", help="record runtime_ms (breaks byte stability)")
    p.set_defaults(func=_cmd_run)
    sub.add_parser("list-families", help="print the family catalog").set_defaults(func=_cmd_list)
    sub.add_parser("selftest", help="run the acceptance suite").set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
