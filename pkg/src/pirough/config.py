"""Flat ``key = value`` experiment configs with dotted section keys.

Example::

    pi.p = 2
    pi.k = 1,2
    driver.kind = segments
    driver.segments = 1,0;0,1
    field.gamma = 2.5,1.5
    field.1.family = rotation
    field.2.family = exp_decay
    field.2.c = 0.5,-0.4
    field.2.a = 0.3,0.2
    run.N = auto

Lines starting with ``#`` are comments. Vectors are comma separated and
matrices use ``;`` between rows. A ``family = <name>`` key loads a registered
test family, whose grading, field and driver can then be overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field as dc_field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .families import REGISTRY, Family, drift_lift, l_path, random_pl_path, self_similar_path, takagi_path
from .fields import Component, ExpDecay, Linear, Polynomial, Trig, VectorField, rotation
from .lift import PLPath
from .words import PiIndex

DEFAULT_SEED = 42
KNOWN_SECTIONS = ("pi", "driver", "field", "run")
KNOWN_TOP = ("family", "seed")


def parse_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {n}: empty key")
        if key.split(".", 1)[0] not in KNOWN_SECTIONS and key not in KNOWN_TOP:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = value
    return out


def _floats(s: str, key: str) -> list[float]:
    try:
        return [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {s!r}") from None


def _matrix(s: str, key: str) -> np.ndarray:
    rows = [_floats(r, key) for r in s.split(";") if r.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigError(f"{key}: expected rows of equal length separated by ';'")
    return np.array(rows)


def _int(s: str, key: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {s!r}") from None


def _float(s: str, key: str) -> float:
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {s!r}") from None


@dataclass
class ExperimentConfig:
    """Resolved grading, driver, field and run settings."""

    raw: dict[str, str]
    seed: int = DEFAULT_SEED
    ix: Optional[PiIndex] = None
    path: Optional[PLPath] = None
    field: Optional[VectorField] = None
    N: Optional[int] = None
    s: Optional[float] = None
    t: Optional[float] = None
    levels: int = 7
    intervals: list[tuple[float, float]] = dc_field(default_factory=list)
    refine: int = 2
    tol: float = 1e-12
    xi: Optional[np.ndarray] = None
    cap: float = 1.0
    C: float = 1.0
    family: Optional[str] = None

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.raw.get(key, default)

    def floats(self, key: str, default) -> list[float]:
        return _floats(self.raw[key], key) if key in self.raw else list(default)

    def require(self, *names: str):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"this subcommand needs a {name} section in the config")

    def ends(self) -> list[float]:
        return [self.s + 2.0 ** (-k) * (self.t - self.s) for k in range(self.levels)]


def _index(raw: dict[str, str]) -> Optional[PiIndex]:
    keys = {k for k in raw if k.startswith("pi.")}
    if not keys:
        return None
    try:
        if "pi.p_list" in raw:
            if keys - {"pi.p_list", "pi.d"}:
                raise ConfigError("pi.p_list cannot be combined with pi.p or pi.k")
            ix = PiIndex(tuple(_floats(raw["pi.p_list"], "pi.p_list")))
        elif "pi.p" in raw and "pi.k" in raw:
            ks = tuple(_int(v, "pi.k") for v in raw["pi.k"].split(","))
            ix = PiIndex.uniform(_float(raw["pi.p"], "pi.p"), ks)
        elif "pi.p" in raw and "pi.d" in raw:
            ix = PiIndex.homogeneous(_float(raw["pi.p"], "pi.p"), _int(raw["pi.d"], "pi.d"))
        else:
            raise ConfigError("pi needs p_list, or p with k, or p with d")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid grading: {exc}") from None
    if "pi.d" in raw and ix.d != _int(raw["pi.d"], "pi.d"):
        raise ConfigError(f"pi.d={raw['pi.d']} does not match the {ix.d} letters given")
    return ix


def _component(raw: dict[str, str], i: int, n: int) -> Component:
    pre = f"field.{i}."
    fam = raw.get(pre + "family")
    if fam is None:
        raise ConfigError(f"missing {pre}family")

    def vec(name, default=None):
        key = pre + name
        if key not in raw:
            if default is None:
                raise ConfigError(f"missing {key}")
            return np.asarray(default, dtype=float)
        v = np.array(_floats(raw[key], key))
        if v.size != n:
            raise ConfigError(f"{key}: expected {n} entries")
        return v

    try:
        if fam == "linear":
            A = _matrix(raw.get(pre + "A", ""), pre + "A")
            if A.shape != (n, n):
                raise ConfigError(f"{pre}A must be {n}x{n}")
            return Linear(A, vec("b", np.zeros(n)))
        if fam == "rotation":
            return rotation(_float(raw.get(pre + "rate", "1"), pre + "rate"), n)
        if fam == "polynomial":
            # terms: "k,coef,e_1,...,e_n; ..." with k a 1-based output coordinate
            rows = _matrix(raw.get(pre + "terms", ""), pre + "terms")
            if rows.shape[1] != n + 2:
                raise ConfigError(f"{pre}terms rows need k, coef and {n} exponents")
            terms = [(int(r[0]) - 1, r[1], tuple(int(e) for e in r[2:])) for r in rows]
            return Polynomial(n, terms)
        if fam == "exp_decay":
            return ExpDecay(vec("c"), vec("a"))
        if fam == "trig":
            return Trig(vec("c"), vec("a"), _float(raw.get(pre + "phase", "0"), pre + "phase"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{pre}: {exc}") from None
    raise ConfigError(f"unknown field family {fam!r} (linear, rotation, polynomial, exp_decay, trig)")


def _field(raw: dict[str, str], d: int, n_default: Optional[int]) -> Optional[VectorField]:
    if not any(k.startswith("field.") for k in raw):
        return None
    n = _int(raw["field.n"], "field.n") if "field.n" in raw else n_default
    if n is None:
        raise ConfigError("missing field.n")
    comps = [_component(raw, i, n) for i in range(1, d + 1)]
    if "field.gamma" not in raw:
        raise ConfigError("missing field.gamma")
    gam = _floats(raw["field.gamma"], "field.gamma")
    conv = raw.get("field.gamma_convention", "standard")
    if conv == "reduced":
        # reduced indices gamma_bar_i are related by gamma_i - 1 = p_max * gamma_bar_i
        p_max = float(raw.get("_p_max", "1"))
        gam = [p_max * g + 1.0 for g in gam]
    elif conv != "standard":
        raise ConfigError("field.gamma_convention must be standard or reduced")
    box = _matrix(raw["field.box"], "field.box") if "field.box" in raw else np.tile([-5.0, 5.0], (n, 1))
    density = _int(raw.get("field.density", "21"), "field.density")
    try:
        return VectorField(comps, gam, box, density)
    except ValueError as exc:
        raise ConfigError(f"invalid field: {exc}") from None


def _path(raw: dict[str, str], base: Optional[Path], d: Optional[int], seed: int) -> Optional[PLPath]:
    kind = raw.get("driver.kind")
    if kind is None:
        return None
    try:
        if kind == "file":
            if "driver.file" not in raw:
                raise ConfigError("driver.kind=file needs driver.file")
            p = Path(raw["driver.file"])
            if base is not None and not p.is_absolute():
                p = base / p
            try:
                path = PLPath.from_csv(p.read_text())
            except OSError as exc:
                raise ConfigError(f"cannot read driver file: {exc}") from None
        elif kind == "segments":
            inc = _matrix(raw.get("driver.segments", ""), "driver.segments")
            if "driver.times" in raw:
                times = _floats(raw["driver.times"], "driver.times")
            else:
                times = list(range(inc.shape[0] + 1))
            path = PLPath(times, np.vstack((np.zeros(inc.shape[1]), np.cumsum(inc, axis=0))))
        elif kind == "l_path":
            path = l_path()
        elif kind == "random":
            rng = np.random.default_rng(seed)
            path = random_pl_path(
                rng,
                _int(raw.get("driver.d", str(d or 2)), "driver.d"),
                _int(raw.get("driver.n_segments", "6"), "driver.n_segments"),
                _float(raw.get("driver.scale", "1"), "driver.scale"),
            )
        elif kind == "takagi":
            shifts = _floats(raw.get("driver.shifts", "0"), "driver.shifts")
            path = takagi_path(
                _float(raw.get("driver.hurst", "0.5"), "driver.hurst"),
                _int(raw.get("driver.depth", "9"), "driver.depth"),
                _float(raw.get("driver.amplitude", "1"), "driver.amplitude"),
                shifts,
            )
        elif kind == "self_similar":
            end = _floats(raw.get("driver.end", ""), "driver.end")
            ex = _floats(raw.get("driver.exponents", ""), "driver.exponents")
            knots_u = _floats(raw.get("driver.knot_times", ""), "driver.knot_times")
            knots_v = _matrix(raw.get("driver.knot_values", ""), "driver.knot_values")
            if len(knots_u) != knots_v.shape[0]:
                raise ConfigError("driver.knot_times and driver.knot_values differ in length")
            path = self_similar_path(end, list(zip(knots_u, knots_v)), ex, _int(raw.get("driver.depth", "24"), "driver.depth"))
        else:
            raise ConfigError(f"unknown driver.kind {kind!r}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid driver: {exc}") from None
    if "driver.drift" in raw:
        path = drift_lift(path, _float(raw["driver.drift"], "driver.drift"))
    return path


def build(raw: dict[str, str], base: Optional[Path] = None, seed: Optional[int] = None) -> ExperimentConfig:
    """Resolve a parsed key map. ``seed`` overrides the ``seed`` key."""
    if seed is None:
        seed = _int(raw.get("seed", str(DEFAULT_SEED)), "seed")
    if seed < 0 or seed >= 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    cfg = ExperimentConfig(raw=dict(raw), seed=seed)
    fam: Optional[Family] = None
    if "family" in raw:
        name = raw["family"]
        if name not in REGISTRY:
            raise ConfigError(f"unknown family {name!r}; known: {', '.join(sorted(REGISTRY))}")
        fam = REGISTRY[name]()
        cfg.family = name
    ix = _index(raw)
    cfg.ix = ix if ix is not None else (fam.ix if fam else None)
    r = dict(raw)
    if cfg.ix is not None:
        r["_p_max"] = repr(cfg.ix.p_max)
    d = cfg.ix.d if cfg.ix is not None else None
    fld = _field(r, d, None) if d is not None else None
    if fld is None and any(k.startswith("field.") for k in raw) and d is None:
        raise ConfigError("field settings need a pi section")
    cfg.field = fld if fld is not None else (fam.field if fam else None)
    path = _path(raw, base, d, seed)
    cfg.path = path if path is not None else (fam.path if fam else None)
    if cfg.ix is not None and cfg.path is not None and cfg.path.d != cfg.ix.d:
        raise ConfigError(f"driver has {cfg.path.d} components but the grading has {cfg.ix.d} letters")
    if cfg.field is not None and cfg.ix is not None and len(cfg.field.components) != cfg.ix.d:
        raise ConfigError("need one field component per letter")
    n_val = raw.get("run.N", "auto")
    if n_val == "auto":
        cfg.N = fam.N if (fam and "pi.p" not in raw and "pi.p_list" not in raw) else None
    else:
        cfg.N = _int(n_val, "run.N")
        if cfg.N < 0:
            raise ConfigError("run.N must be nonnegative")
    if cfg.path is not None:
        cfg.s = _float(raw["run.s"], "run.s") if "run.s" in raw else (fam.s if fam else cfg.path.start)
        cfg.t = _float(raw["run.t"], "run.t") if "run.t" in raw else (fam.t if fam else cfg.path.end)
        if not cfg.path.start <= cfg.s < cfg.t <= cfg.path.end:
            raise ConfigError("need driver start <= run.s < run.t <= driver end")
    cfg.levels = _int(raw.get("run.levels", "7"), "run.levels")
    if cfg.levels < 1:
        raise ConfigError("run.levels must be at least 1")
    if "run.intervals" in raw:
        for piece in raw["run.intervals"].split(";"):
            a = _floats(piece.replace(":", ","), "run.intervals")
            if len(a) != 2 or a[0] > a[1]:
                raise ConfigError("run.intervals entries look like s:t with s <= t")
            cfg.intervals.append((a[0], a[1]))
    cfg.refine = _int(raw.get("run.refine", "2"), "run.refine")
    if cfg.refine < 0:
        raise ConfigError("run.refine must be nonnegative")
    cfg.tol = _float(raw.get("run.tol", "1e-12"), "run.tol")
    if not cfg.tol > 0:
        raise ConfigError("run.tol must be positive")
    cfg.cap = _float(raw.get("run.cap", "1"), "run.cap")
    cfg.C = _float(raw.get("run.C", "1"), "run.C")
    if "run.xi" in raw:
        cfg.xi = np.array(_floats(raw["run.xi"], "run.xi"))
    elif fam is not None:
        cfg.xi = fam.xi
    elif cfg.field is not None:
        cfg.xi = np.zeros(cfg.field.n)
    if cfg.xi is not None and cfg.field is not None and cfg.xi.size != cfg.field.n:
        raise ConfigError("run.xi has the wrong dimension")
    if not math.isfinite(cfg.cap) or cfg.cap < 0:
        raise ConfigError("run.cap must be a nonnegative number")
    return cfg


def load(path, seed: Optional[int] = None) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return build(parse_text(text), p.parent, seed)


__all__ = ["DEFAULT_SEED", "ExperimentConfig", "build", "load", "parse_text"]
