"""Execute configured checks and write results.csv, plot_data.csv and report.json."""

import csv
import io
import itertools
import json
import math
import os
import time
import zlib
from dataclasses import asdict, dataclass, field

from ..errors import PolylabError, ValidationError
from ..geometry import random_shear
from ..rng import RngStream
from .. import analysis as an
from .config import build_body, build_density, serialize

CSV_COLUMNS = ("check", "n", "q", "estimate", "stderr", "bound_or_target", "pass")
PLOT_COLUMNS = ("fit", "log_n", "log_estimate", "stderr")

LABELS = {
    "efron": "efron-identity",
    "extended_efron": "extended-efron",
    "margin_transfer": "margin-transfer",
    "nykodim": "nykodim-hausdorff",
    "projection_density": "projection-density",
    "deviation_tail": "deviation-tail",
    "rate_missing_mass": "missing-volume-rate",
    "rate_Vn": "missing-volume-rate",
    "rate_Rn": "vertex-count-rate",
    "affine_invariance": "affine-invariance",
    "worst_case": "worst-case-density",
}
RATE_QUANTITY = {"rate_missing_mass": "missing_mass", "rate_Vn": "V_n_normalized",
                 "rate_Rn": "R_n"}
USES_N = {"efron", "extended_efron", "margin_transfer", "deviation_tail", "affine_invariance"}
USES_Q = {"extended_efron", "rate_missing_mass", "rate_Vn", "rate_Rn", "worst_case"}
USES_GRID = {"rate_missing_mass", "rate_Vn", "rate_Rn", "worst_case"}


@dataclass
class ExperimentReport:
    config: object
    reports: list = field(default_factory=list)
    runtime: float = 0.0
    error: str = None

    @property
    def passed(self):
        return self.error is None and all(r.passed for r in self.reports)

    def to_dict(self):
        return {"config": serialize(self.config), "pass": self.passed, "runtime": self.runtime,
                "error": self.error, "checks": [r.to_dict() for r in self.reports]}


def check_stream(seed, label):
    """Stream for one check task, keyed by its label so tasks do not share randomness."""
    return RngStream(seed, zlib.crc32(label.encode()))


def _tasks(cfg):
    for name in cfg.checks:
        ns = cfg.n if name in USES_N else (None,)
        qs = cfg.q if name in USES_Q else (None,)
        if name in USES_N and not cfg.n:
            raise ValidationError("n", f"check {name!r} needs n")
        if name in USES_GRID and len(cfg.n_grid) < 4:
            raise ValidationError("n_grid", f"check {name!r} needs at least 4 grid points")
        for n, q in itertools.product(ns, qs):
            tags = []
            if n is not None and len(cfg.n) > 1:
                tags.append(f"n={n}")
            if q is not None and len(cfg.q) > 1:
                tags.append(f"q={q}")
            label = name + (f"[{','.join(tags)}]" if tags else "")
            yield name, label, n, q


def run_check(cfg, name, n, q, rng, spec=None):
    spec = build_density(cfg) if spec is None else spec
    kw = {"threads": cfg.threads}
    if name == "efron":
        return an.check_efron(spec, n, cfg.reps, rng, fresh_m=cfg.fresh_m, **kw)
    if name == "extended_efron":
        return an.check_extended_efron(spec, n, q, cfg.reps, rng, **kw)
    if name == "margin_transfer":
        return an.check_margin_transfer(spec, n, cfg.reps, rng,
                                        fresh_m=cfg.fresh_m or an.checks.PREMISE_FRESH_M, **kw)
    if name in RATE_QUANTITY:
        return an.check_rate(spec, RATE_QUANTITY[name], q, cfg.n_grid, cfg.reps, rng,
                             mode=cfg.mode, tol=cfg.tol, fresh_m=cfg.fresh_m, name=name, **kw)
    if name == "deviation_tail":
        return an.check_deviation_tail(spec, n, cfg.reps, rng, grid_points=cfg.tail_points,
                                       fresh_m=cfg.fresh_m, **kw)
    if name == "affine_invariance":
        T = random_shear(cfg.d, rng.spawn(1_000_003), cfg.condition)
        return an.check_affine_invariance(spec.support, T, n, cfg.reps, rng, **kw)
    if name == "worst_case":
        return an.check_worst_case_uniform(spec.support, cfg.n_grid, cfg.reps, rng, q=q,
                                           tol=cfg.tol, **kw)
    if name == "nykodim":
        return an.check_nykodim_domination(cfg.d, cfg.pairs, rng, cfg.max_points, cfg.mc_points)
    if name == "projection_density":
        D = cfg.proj_dim or cfg.d + 1
        return an.check_projection_density(cfg.n[0] if cfg.n else 10**6, rng, D=D, d=cfg.d,
                                           t_max=cfg.t_max, bins=cfg.bins,
                                           radial_bins=cfg.radial_bins)
    raise ValidationError("checks", f"unknown check {name!r}")


def run(cfg, out_dir=None, log=None):
    """Run every configured check; outputs are flushed even if a check raises."""
    if cfg.seed is None:
        raise ValidationError("seed", "a seed is required (--seed, POLYLAB_SEED or 'seed =')")
    report = ExperimentReport(cfg)
    start = time.perf_counter()
    try:
        tasks = list(_tasks(cfg))
        spec = build_density(cfg) if tasks else None
        for name, label, n, q in tasks:
            try:
                rep = run_check(cfg, name, n, q, check_stream(cfg.seed, label), spec)
            except PolylabError as exc:
                raise PolylabError(f"{label}: {exc}") from exc
            rep.check_name = label
            report.reports.append(rep)
            if log:
                log(f"{'PASS' if rep.passed else 'FAIL'} {label} ({rep.runtime:.1f}s)")
    except PolylabError as exc:
        report.error = str(exc)
        raise
    finally:
        report.runtime = time.perf_counter() - start
        if out_dir is not None:
            write_outputs(report, out_dir)
    return report


def _num(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def results_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for row in rep.rows:
            w.writerow([_relabel(row["check"], rep.check_name)]
                       + [_num(row[c]) for c in CSV_COLUMNS[1:]])
    return buf.getvalue()


def _base(label):
    return label.split("[", 1)[0]


def _relabel(name, label):
    """Prefix a row or fit name from a check with the task label (which carries n/q tags)."""
    base = _base(label)
    return label + name[len(base):] if name.startswith(base) else name


def plot_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for rep in reports:
        for label, fit in rep.fits:
            label = _relabel(label, rep.check_name)
            for n, est, se in zip(fit.n_grid, fit.estimates, fit.stderrs):
                w.writerow([label, repr(math.log(n)), repr(math.log(est)), repr(se / est)])
    return buf.getvalue()


def write_outputs(report, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(results_csv(report.reports))
    with open(os.path.join(out_dir, "plot_data.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(plot_csv(report.reports))
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, default=_json_default)
        fh.write("\n")


def _json_default(v):
    if hasattr(v, "tolist"):
        return v.tolist()
    if hasattr(v, "item"):
        return v.item()
    raise TypeError(f"not serializable: {type(v).__name__}")


# ---------------------------------------------------------------- summary

_HEADLINE = ("difference", "exponent", "violations", "failures", "p_value", "r_squared",
             "min_margin_sigmas", "lhs")


def _headline(stats):
    for key in _HEADLINE:
        if key in stats:
            se = stats.get(f"{key}_stderr")
            val = f"{key}={stats[key]:.4g}"
            return val + (f"±{se:.2g}" if se is not None else "")
    return ""


def summary_table(checks):
    """Pass/fail matrix for check dicts (as stored in report.json)."""
    if not checks:
        return "no checks requested"
    rows = [("result", "check", "status", "statistic")]
    for c in checks:
        rows.append((LABELS.get(_base(c["check_name"]), _base(c["check_name"])), c["check_name"],
                     "PASS" if c["pass"] else "FAIL", _headline(c["statistics"])))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
