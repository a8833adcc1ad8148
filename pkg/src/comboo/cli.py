"""Command line entry point: ``comboo run | compute-hv | list-problems``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys

from comboo.errors import ConfigError, InputError, UnsupportedError
from comboo.harness import (
    EXIT_CONFIG,
    EXIT_RUNTIME,
    compute_hv_file,
    format_hv,
    parse_config,
    problem_table,
    run_experiment,
)


def _z_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--z expects numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="comboo", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--baseline", action="append", choices=["random"], default=[],
                       help="also run a baseline (repeatable)")
    p_run.add_argument("--out", default=None, help="output directory")

    p_hv = sub.add_parser("compute-hv", help="hypervolume of points in a CSV file")
    p_hv.add_argument("points")
    p_hv.add_argument("--z", required=True, type=_z_values,
                      help="reference point, comma or space separated")
    p_hv.add_argument("--mc", type=int, default=None, metavar="N",
                      help="Monte Carlo estimate with N scalarization samples")
    p_hv.add_argument("--seed", type=int, default=0)

    p_list = sub.add_parser("list-problems", help="show registered problems")
    p_list.add_argument("--format", choices=["table", "csv"], default="table")
    return parser


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run_experiment(cfg, out_dir=args.out, baselines=args.baseline)
    if result.message:
        print(("warning: " if result.exit_code == 4 else "error: ") + result.message, file=sys.stderr)
    print(f"wrote {len(result.files)} files to {result.out_dir}")
    return result.exit_code


def _cmd_hv(args) -> int:
    if args.mc is not None and args.mc < 1:
        print("error: --mc must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        value = compute_hv_file(args.points, args.z, mc=args.mc, seed=args.seed)
    except (InputError, UnsupportedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME if isinstance(exc, UnsupportedError) else EXIT_CONFIG
    print(format_hv(value))
    return 0


def _cmd_list(args) -> int:
    rows = problem_table()
    if args.format == "csv":
        writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return 0
    for r in rows:
        tag = "" if r["shipped"] else "  (plug-in evaluator required)"
        print(f"{r['name']:<16} d={r['d']:<3} m={r['m']} c={r['c']}  {r['domain']}{tag}")
        if r["z"]:
            print(f"{'':<16} z=({r['z']})  noise_f=({r['noise_sd_f']})  noise_g=({r['noise_sd_g']})"
                  + (f"  resolution={r['resolution']}" if r["resolution"] else ""))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "compute-hv": _cmd_hv, "list-problems": _cmd_list}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
