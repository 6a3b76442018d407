"""polylab command line: run, check, fit, summary."""

import argparse
import csv
import json
import math
import os
import sys

from ..analysis import fit_power_law
from ..errors import PolylabError, ValidationError
from .config import CHECKS, ExperimentConfig, convert, parse_config, validate
from .runner import run, summary_table

SEED_ENV = "POLYLAB_SEED"
EXIT_FAIL = 1
EXIT_ERROR = 2

# ad hoc flags accepted by ``run`` and ``check``: flag -> config key
_FIELD_FLAGS = {"--body": "body", "--d": "d", "--n": "n", "--n-grid": "n_grid", "--q": "q",
                "--density": "density", "--gamma": "gamma", "--rho0": "rho0",
                "--fresh-m": "fresh_m", "--proj-dim": "proj_dim"}


def _add_common(p):
    p.add_argument("--config", help="config file (key = value lines)")
    p.add_argument("--seed", help="master seed; overrides POLYLAB_SEED and the config file")
    p.add_argument("--reps", help="replicates per estimate")
    p.add_argument("--threads", help="worker threads (results do not depend on it)")
    p.add_argument("--out-dir", help="directory for results.csv, plot_data.csv, report.json")
    for flag, key in _FIELD_FLAGS.items():
        p.add_argument(flag, dest=key, help=f"set config key {key!r}")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="set any config key (repeatable)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polylab", description="Monte Carlo checks for random polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the checks listed in a config")
    _add_common(p)
    p.add_argument("--check", action="append", dest="check_list", metavar="NAME",
                   help="run this check (repeatable); replaces the config's list")

    p = sub.add_parser("check", help="run a single named check")
    p.add_argument("name", choices=CHECKS)
    _add_common(p)

    p = sub.add_parser("fit", help="fit power laws to the rate rows of a results.csv")
    p.add_argument("results", help="results.csv written by run/check")
    p.add_argument("--check", dest="only", help="only fit rows whose check starts with this")

    p = sub.add_parser("summary", help="print the pass/fail matrix of report.json files")
    p.add_argument("reports", nargs="+", help="report.json files or output directories")
    return parser


def resolve_config(args, environ=os.environ):
    """Config file, then flags; seed precedence is flag > POLYLAB_SEED > file."""
    values = {}
    if args.config:
        base = parse_config(args.config)
        values = {k: getattr(base, k) for k in ExperimentConfig.__dataclass_fields__}
    overrides = {key: getattr(args, key) for key in _FIELD_FLAGS.values()}
    overrides.update(reps=args.reps, threads=args.threads, out_dir=args.out_dir)
    for item in args.set:
        if "=" not in item:
            raise ValidationError(item, "--set expects KEY=VALUE")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    if environ.get(SEED_ENV) is not None and args.seed is None:
        overrides["seed"] = environ[SEED_ENV]
    if args.seed is not None:
        overrides["seed"] = args.seed
    for key, text in overrides.items():
        if text is not None:
            values[key] = convert(key, text)
    return validate(ExperimentConfig(**values))


def _run(cfg, out=None):
    out = out or sys.stdout
    report = run(cfg, out_dir=cfg.out_dir, log=lambda s: print(s, file=sys.stderr))
    print(summary_table([r.to_dict() for r in report.reports]), file=out)
    return 0 if report.passed else EXIT_FAIL


def _fit(path, only, out=None):
    out = out or sys.stdout
    groups = {}
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if only and not row["check"].startswith(only):
                continue
            try:
                n = int(row["n"])
            except ValueError:
                continue
            key = (row["check"], row["q"])
            groups.setdefault(key, []).append((n, float(row["estimate"]), float(row["stderr"])))
    found = False
    for (check, q), pts in groups.items():
        if len(pts) < 4:
            continue
        found = True
        n, est, se = zip(*sorted(pts))
        fit = fit_power_law(n, est, se)
        print(f"{check} q={q}: exponent {fit.exponent:.4f} ± {fit.exponent_stderr:.4f}, "
              f"r^2 {fit.r_squared:.4f}, {len(n)} points", file=out)
    if not found:
        print("no rate rows with at least 4 grid points", file=out)
    return 0


def _summary(paths, out=None):
    out = out or sys.stdout
    checks = []
    ok = True
    for path in paths:
        if os.path.isdir(path):
            path = os.path.join(path, "report.json")
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        checks.extend(data["checks"])
        ok = ok and data.get("error") is None
    print(summary_table(checks), file=out)
    return 0 if ok and all(c["pass"] for c in checks) else EXIT_FAIL


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            return _fit(args.results, args.only)
        if args.command == "summary":
            return _summary(args.reports)
        cfg = resolve_config(args)
        if args.command == "check":
            cfg = cfg.replace(checks=(args.name,))
        elif args.check_list:
            cfg = cfg.replace(checks=tuple(args.check_list))
        if not cfg.checks:
            print("no checks requested")
            return 0
        return _run(cfg)
    except (PolylabError, OSError) as exc:
        print(f"polylab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
