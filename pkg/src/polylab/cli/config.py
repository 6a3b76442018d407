"""Experiment configuration: flat ``key = value`` text with typed validation.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Lists are comma separated, matrices separate rows with ``;`` and geometric
grids may be written ``start:stop:xfactor`` (``64:8192:x2``).
"""

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParseError, ValidationError
from ..geometry import Ball, Box, Ellipsoid, PolytopeBody, Simplex
from ..sampling import DensitySpec

CHECKS = (
    "efron", "extended_efron", "margin_transfer", "rate_missing_mass", "rate_Vn", "rate_Rn",
    "deviation_tail", "affine_invariance", "worst_case", "nykodim", "projection_density",
)
BODIES = ("ball", "box", "simplex", "ellipsoid", "polytope")
BODY_ALIASES = {"disk": ("ball", 2), "square": ("box", 2), "triangle": ("simplex", 2),
                "cube": ("box", 3)}
DENSITIES = ("uniform", "margin_power", "projection")
MODES = ("tight", "bound")


# value codecs: (parse(text) -> value, format(value) -> text)

def _int(text):
    try:
        return int(text)
    except ValueError:
        v = float(text)  # allows 1e5
    if not v.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(v)


def _float(text):
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {text!r}")
    return v


def _items(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _int_list(text):
    return tuple(_int(t) for t in _items(text))


def _float_list(text):
    return tuple(_float(t) for t in _items(text))


def _matrix(text):
    rows = tuple(_float_list(r) for r in text.split(";") if r.strip())
    if len({len(r) for r in rows}) > 1:
        raise ValueError("matrix rows have different lengths")
    return rows


def parse_grid(text):
    """``start:stop:xF`` -> (start, start*F, ...) up to stop; else a comma list."""
    if ":" not in text:
        return _int_list(text)
    parts = [p.strip() for p in text.split(":")]
    if len(parts) != 3 or not parts[2].lower().startswith("x"):
        raise ValueError(f"grid must look like start:stop:xfactor, got {text!r}")
    start, stop, factor = _int(parts[0]), _int(parts[1]), _float(parts[2][1:])
    if start < 1 or stop < start or factor <= 1:
        raise ValueError("grid needs 1 <= start <= stop and factor > 1")
    out, v = [], float(start)
    while round(v) <= stop:
        out.append(int(round(v)))
        v *= factor
    return tuple(out)


def _str(text):
    return text.strip()


def _str_list(text):
    return tuple(_items(text))


def _fmt_num(v):
    return str(v) if isinstance(v, int) else repr(float(v))


def _fmt_list(v):
    return ", ".join(_fmt_num(x) if not isinstance(x, str) else x for x in v)


def _fmt_matrix(v):
    return "; ".join(_fmt_list(r) for r in v)


def _optional(parse):
    return lambda text: None if text.strip().lower() == "none" else parse(text)


_CODECS = {
    "int": (_int, _fmt_num), "float": (_float, _fmt_num), "str": (_str, str),
    "ints": (_int_list, _fmt_list), "floats": (_float_list, _fmt_list),
    "grid": (parse_grid, _fmt_list), "strs": (_str_list, _fmt_list),
    "matrix": (_matrix, _fmt_matrix),
}


def _f(kind, default=None, help=""):
    return field(default=default, metadata={"kind": kind, "help": help})


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = _f("int", help="ambient dimension")
    body: str = _f("str", "ball", "ball, box, simplex, ellipsoid, polytope (or disk, square, triangle, cube)")
    center: tuple = _f("floats", help="ball/ellipsoid center (default origin)")
    radius: float = _f("float", 1.0, "ball radius")
    lower: tuple = _f("floats", help="box lower corner (default 0)")
    upper: tuple = _f("floats", help="box upper corner (default 1)")
    vertices: tuple = _f("matrix", help="simplex/polytope vertices, rows separated by ';'")
    shape: tuple = _f("matrix", help="ellipsoid matrix A in {c + A u : |u| <= 1}")
    density: str = _f("str", "uniform", "uniform, margin_power or projection")
    gamma: float = _f("float", help="margin_power exponent")
    rho0: float = _f("float", help="margin_power cap on boundary distance (default inradius)")
    proj_dim: int = _f("int", help="projection: dimension D of the unit ball projected to R^d")
    n: tuple = _f("ints", (), "sample sizes for fixed-n checks")
    n_grid: tuple = _f("grid", (), "sample-size grid for rate checks")
    q: tuple = _f("ints", (1,), "moment orders")
    reps: int = _f("int", 1000, "replicates per estimate")
    fresh_m: int = _f("int", help="fresh points per replicate for the missing f-mass")
    seed: int = _f("int", help="master seed (required; flag > POLYLAB_SEED > file)")
    checks: tuple = _f("strs", (), "checks to run")
    out_dir: str = _f("str", "polylab-out", "output directory")
    threads: int = _f("int", 1, "worker threads for replicates")
    mode: str = _f("str", help="rate checks: tight or bound (default from body and density)")
    tol: float = _f("float", help="rate checks: exponent tolerance")
    condition: float = _f("float", 50.0, "affine_invariance: shear condition number")
    pairs: int = _f("int", 1000, "nykodim: number of hull pairs")
    max_points: int = _f("int", 30, "nykodim: max points per hull")
    mc_points: int = _f("int", 20000, "nykodim: Monte Carlo points per pair")
    t_max: float = _f("float", 0.2, "projection_density: boundary layer width")
    bins: int = _f("int", 20, "projection_density: boundary bins")
    radial_bins: int = _f("int", 50, "projection_density: equal-probability radial bins")
    tail_points: int = _f("int", 20, "deviation_tail: grid points")

    def replace(self, **changes):
        return validate(dataclasses.replace(self, **changes))


FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def convert(key, text):
    """Typed value for ``key`` from its text form; ValidationError names the key."""
    if key not in FIELDS:
        raise ValidationError(key, "unknown key")
    parse = _optional(_CODECS[FIELDS[key].metadata["kind"]][0])
    try:
        return parse(text)
    except ValueError as exc:
        raise ValidationError(key, str(exc)) from None


def validate(cfg):
    """Normalize aliases and check cross-field consistency."""
    changes = {}
    body = cfg.body.lower()
    if body in BODY_ALIASES:
        body, dim = BODY_ALIASES[body]
        if cfg.d is not None and cfg.d != dim:
            raise ValidationError("d", f"body {cfg.body!r} is {dim}-dimensional, d = {cfg.d}")
        changes["d"] = dim
    if body not in BODIES:
        raise ValidationError("body", f"unknown body {cfg.body!r}")
    changes["body"] = body
    d = changes.get("d", cfg.d)
    if d is None:
        raise ValidationError("d", "dimension is required")
    if d < 2:
        raise ValidationError("d", "dimension must be at least 2")
    if cfg.density not in DENSITIES:
        raise ValidationError("density", f"unknown density {cfg.density!r}")
    if cfg.density == "margin_power" and cfg.gamma is None:
        raise ValidationError("gamma", "margin_power needs gamma")
    if cfg.density == "projection":
        if cfg.proj_dim is None or cfg.proj_dim <= d:
            raise ValidationError("proj_dim", "projection needs proj_dim > d")
        if body != "ball":
            raise ValidationError("body", "projection densities live on the unit ball")
    for name in cfg.checks:
        if name not in CHECKS:
            raise ValidationError("checks", f"unknown check {name!r}; known: {', '.join(CHECKS)}")
    if cfg.mode is not None and cfg.mode not in MODES:
        raise ValidationError("mode", "must be tight or bound")
    for key in ("reps", "threads", "pairs", "bins", "radial_bins", "mc_points"):
        if getattr(cfg, key) < 1:
            raise ValidationError(key, "must be positive")
    if any(k < 1 for k in cfg.q):
        raise ValidationError("q", "moment orders must be positive")
    if any(k < 1 for k in cfg.n):
        raise ValidationError("n", "sample sizes must be positive")
    return dataclasses.replace(cfg, **changes)


def parse_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected 'key = value'", lineno, col)
        key, value = line.split("=", 1)
        name = key.strip()
        if not name:
            raise ParseError("missing key before '='", lineno, line.index("=") + 1)
        if not value.strip():
            raise ParseError(f"missing value for {name!r}", lineno, line.index("=") + 2)
        if name in values:
            raise ParseError(f"duplicate key {name!r}", lineno, key.index(name) + 1)
        values[name] = convert(name, value)
    return validate(ExperimentConfig(**values))


def parse_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read())


def serialize(cfg):
    """Text form of ``cfg``; ``parse_text(serialize(cfg)) == cfg``. None and empty fields are omitted."""
    lines = []
    for name, f in FIELDS.items():
        v = getattr(cfg, name)
        if v is None or v == ():
            continue
        lines.append(f"{name} = {_CODECS[f.metadata['kind']][1](v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- bodies and densities

def build_body(cfg):
    d = cfg.d
    if cfg.body == "ball":
        return Ball(cfg.center or np.zeros(d), cfg.radius)
    if cfg.body == "box":
        return Box(cfg.lower or np.zeros(d), cfg.upper or np.ones(d))
    if cfg.body == "simplex":
        return Simplex(cfg.vertices) if cfg.vertices else Simplex.standard(d)
    if cfg.body == "ellipsoid":
        if not cfg.shape:
            raise ValidationError("shape", "ellipsoid needs a shape matrix")
        return Ellipsoid(cfg.center or np.zeros(d), cfg.shape)
    if not cfg.vertices:
        raise ValidationError("vertices", "polytope needs vertices")
    return PolytopeBody.from_points(cfg.vertices)


def build_density(cfg, body=None):
    body = build_body(cfg) if body is None else body
    if cfg.density == "uniform":
        return DensitySpec.uniform(body)
    if cfg.density == "margin_power":
        rho0 = cfg.rho0 if cfg.rho0 is not None else body.inradius()
        return DensitySpec.margin_power(body, cfg.gamma, rho0)
    return DensitySpec.projection(Ball.unit(cfg.proj_dim), cfg.d)


def _rows(a):
    return tuple(tuple(float(x) for x in r) for r in np.asarray(a))


def body_items(K):
    """Config items describing body ``K``."""
    if isinstance(K, Ball):
        return {"d": K.dim, "body": "ball", "center": tuple(map(float, K.center)), "radius": K.radius}
    if isinstance(K, Box):
        return {"d": K.dim, "body": "box", "lower": tuple(map(float, K.lower)),
                "upper": tuple(map(float, K.upper))}
    if isinstance(K, Simplex):
        return {"d": K.dim, "body": "simplex", "vertices": _rows(K.vertices)}
    if isinstance(K, Ellipsoid):
        return {"d": K.dim, "body": "ellipsoid", "center": tuple(map(float, K.center)),
                "shape": _rows(K.shape)}
    return {"d": K.dim, "body": "polytope", "vertices": _rows(K.polytope.vertices)}


def density_items(spec):
    """Config items describing ``spec``; ``build_density`` inverts this."""
    if spec.kind == "projection":
        if not (isinstance(spec.K0, Ball) and spec.K0 == Ball.unit(spec.K0.dim)):
            raise ValidationError("density", "only projections of the unit ball are configurable")
        return {"d": spec.dim, "body": "ball", "density": "projection", "proj_dim": spec.K0.dim}
    items = body_items(spec.support)
    items["density"] = spec.kind
    if spec.kind == "margin_power":
        items.update(gamma=spec.gamma, rho0=spec.rho0)
    return items


def config_from_density(spec, **extra):
    return validate(ExperimentConfig(**density_items(spec), **extra))
