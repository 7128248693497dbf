"""Command-line entry point: ``swiftlink {simulate,sweep,demo-shift,ripcheck}``.

Exit codes: 0 success, 2 invalid configuration, 3 a ripcheck bound failed.
"""

import argparse
import json
import sys

from . import config as config_mod
from .experiments import (AGG_COLUMNS, RIP_COLUMNS, aggregate, demo_shift, grid_to_csv,
                          rows_to_csv, run_ripcheck, run_simulation)

EXIT_OK, EXIT_INVALID, EXIT_BOUND = 0, 2, 3


def _common(p):
    p.add_argument("--config", help="INI file with an [experiment] section")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials (overrides the config)")
    p.add_argument("--override-range", action="store_true",
                   help="allow CFOs outside the Swift-Link correction range")
    p.add_argument("--workers", type=int, default=1, help="worker processes")


def build_parser():
    ap = argparse.ArgumentParser(prog="swiftlink", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="per-trial results for every method")
    _common(sim)
    sim.add_argument("--timings", action="store_true",
                     help="fill runtime_ms (makes output machine dependent)")
    sw = sub.add_parser("sweep", help="mean/SE per (SNR, CFO, M, method) cell")
    _common(sw)
    sw.add_argument("--timings", action="store_true")
    demo = sub.add_parser("demo-shift", help="beamspace magnitude through a CFO-hit trajectory")
    _common(demo)
    demo.add_argument("--N", type=int, default=16)
    demo.add_argument("--eps", type=float, default=0.09, help="CFO in rad per slot")
    demo.add_argument("--kind", choices=("row", "block", "p", "n"), default="row")
    rc = sub.add_parser("ripcheck", help="numerical checks of the average-RIP bounds")
    _common(rc)
    return ap


def _write(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    key = "rip_trials" if args.command == "ripcheck" else "trials"
    over = {"seed": args.seed, key: args.trials}
    if args.override_range:
        over["override_range"] = True
    return config_mod.load(args.config, **over)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.workers < 1:
            raise config_mod.ConfigError("--workers must be >= 1")
        if args.command == "demo-shift":
            if args.N < 2 or (args.kind == "block" and args.N % 2):
                raise config_mod.ConfigError("invalid grid size for this demo")
            grid = demo_shift(args.N, args.eps, args.kind)
            _write(grid_to_csv(grid, f"demo-shift kind={args.kind} N={args.N} eps={args.eps!r}"),
                   args.out)
            return EXIT_OK
        cfg = _load(args)
    except (config_mod.ConfigError, ValueError) as exc:
        print(f"swiftlink: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "ripcheck":
        report, rows, violations = run_ripcheck(cfg)
        text = rows_to_csv(rows, RIP_COLUMNS, f"ripcheck seed={cfg.seed}")
        _write(text, args.out)
        js = json.dumps(report, indent=2, sort_keys=True)
        if args.out:
            with open(args.out + ".json", "w") as fh:
                fh.write(js + "\n")
        else:
            print(js, file=sys.stderr)
        return EXIT_BOUND if violations else EXIT_OK

    rows = run_simulation(cfg, args.workers, args.timings)
    note = f"seed={cfg.seed} trials={cfg.trials} N={cfg.n_antennas} channel={cfg.channel}"
    if args.command == "simulate":
        _write(rows_to_csv(rows, header_note=note), args.out)
    else:
        _write(rows_to_csv(aggregate(rows), AGG_COLUMNS, note), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
