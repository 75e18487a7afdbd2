"""Command-line entry point: ``pirough <subcommand> --config cfg.txt --out dir``.

Exit codes: 0 when every check passes, 1 on a bound violation, 2 on a
configuration error (message on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Optional

from . import config as cfgmod
from .control import ControlGrid, variation_rows
from .errors import ConfigError, DomainExitError, InadmissibleError, PiRoughError
from .group import GROUP_TOL, shuffle_defect
from .inequalities import factorial_decay_check, kershaw_ratio_check
from .lift import lift_on_grid, path_signature
from .params import admissible_params
from .suite import NEO_P, neoclassical_sweep, run_criteria, run_module_properties
from .taylor import REPORT_HEADER, control_for, remainder_reports
from .words import enumerate_words, word_to_str

OK, VIOLATION, CONFIG = 0, 1, 2


def _num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _write(out: Path, name: str, header: str, rows) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    lines = [header] + [",".join(_num(v) if not isinstance(v, str) else v for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _intervals(cfg: cfgmod.ExperimentConfig) -> list[tuple[float, float]]:
    if cfg.intervals:
        return sorted(cfg.intervals)
    return [(cfg.s, cfg.t)]


def cmd_signature(cfg, out: Path) -> int:
    cfg.require("ix", "path")
    rows = []
    for s, t in _intervals(cfg):
        X = path_signature(cfg.path, s, t, cfg.ix, cfg.cap)
        rows.append((s, t, X))
    if len(rows) == 1:
        X = rows[0][2]
        out.mkdir(parents=True, exist_ok=True)
        (out / "signature.csv").write_text("\n".join(["word,coef"] + X.csv_lines()) + "\n")
    else:
        body = []
        for s, t, X in rows:
            body += [f"{_num(s)},{_num(t)},{line}" for line in X.csv_lines()]
        (out / "signature.csv").parent.mkdir(parents=True, exist_ok=True)
        (out / "signature.csv").write_text("\n".join(["s,t,word,coef"] + body) + "\n")
    return OK


def cmd_shuffle_check(cfg, out: Path) -> int:
    cfg.require("ix", "path")
    rows, bad = [], 0
    for s, t in _intervals(cfg):
        X = path_signature(cfg.path, s, t, cfg.ix, cfg.cap)
        a, r = shuffle_defect(X), shuffle_defect(X, relative=True)
        ok = r <= GROUP_TOL
        bad += not ok
        rows.append((s, t, cfg.cap, a, r, ok))
    _write(out, "shuffle.csv", "s,t,cap,defect,relative_defect,passed", rows)
    return VIOLATION if bad else OK


def cmd_control(cfg, out: Path) -> int:
    cfg.require("ix", "path")
    x = cfg.path
    if cfg.get("run.rescale", "false") == "true":
        cfg.require("field")
        x = x.scaled(cfg.field.lip_norms())
    cg = ControlGrid(lift_on_grid(x, cfg.ix, 1.0, cfg.s, cfg.t, cfg.refine))
    pairs = [(i, j) for i in range(cg.n) for j in range(i + 1, cg.n)]
    var = sorted(variation_rows(cg, pairs), key=lambda r: (r[0], r[1], r[2]))
    _write(out, "variation.csv", "s,t,word,variation", var)
    om = cg.omega_table()
    _write(out, "omega.csv", "s,t,omega", [(cg.grid[i], cg.grid[j], om[i, j]) for i, j in pairs])
    return OK


def cmd_params(cfg, out: Path) -> int:
    cfg.require("ix", "field")
    P = admissible_params(cfg.ix, cfg.field.gammas)
    out.mkdir(parents=True, exist_ok=True)
    (out / "params.json").write_text(json.dumps(P.to_json_dict(), indent=2, sort_keys=True) + "\n")
    return OK


def cmd_taylor(cfg, out: Path) -> int:
    cfg.require("ix", "field", "path", "xi")
    if cfg.intervals:
        reps = []
        for s, t in sorted(cfg.intervals):
            reps += remainder_reports(cfg.field, cfg.path, cfg.xi, s, [t], cfg.ix, cfg.N, cfg.tol, cfg.refine, cfg.C)
    else:
        reps = remainder_reports(cfg.field, cfg.path, cfg.xi, cfg.s, cfg.ends(), cfg.ix, cfg.N, cfg.tol, cfg.refine, cfg.C)
    reps.sort(key=lambda r: (r.s, r.t))
    out.mkdir(parents=True, exist_ok=True)
    (out / "remainder.csv").write_text("\n".join([REPORT_HEADER] + [r.csv_row() for r in reps]) + "\n")
    return VIOLATION if any(r.remainder > r.bound for r in reps) else OK


def cmd_decay(cfg, out: Path) -> int:
    cfg.require("ix", "field", "path")
    P = admissible_params(cfg.ix, cfg.field.gammas)
    if P.N is None:
        raise ConfigError("decay needs a uniform grading")
    N = P.N if cfg.N is None else cfg.N
    cap = (N + 1) / P.p
    ends = cfg.ends()
    cg = control_for(cfg.field, cfg.path, cfg.ix, cfg.s, cfg.t, ends, cfg.refine)
    xbar = cfg.path.scaled(cfg.field.lip_norms())
    words = [w for w in enumerate_words(cfg.ix, cap) if w]
    rows, bad = [], 0
    for e in sorted(ends):
        X = path_signature(xbar, cfg.s, e, cfg.ix, cap)
        om = cg.omega(cfg.s, e)
        for w in words:
            r = factorial_decay_check(X, w, P, om)
            bad += not r["passed"]
            rows.append((cfg.s, e, word_to_str(w), r["weight"], r["lhs"], r["rhs"], r["passed"]))
    _write(out, "decay.csv", "s,t,word,weight,lhs,rhs,passed", rows)
    return VIOLATION if bad else OK


def cmd_neoclassical(cfg, out: Path) -> int:
    p_values = cfg.floats("run.p_values", NEO_P) if cfg else NEO_P
    n_max = int(cfg.get("run.n_max", "10")) if cfg else 10
    grid = int(cfg.get("run.grid", "10")) if cfg else 10
    rows = neoclassical_sweep(p_values, n_max, grid)
    body = sorted((r["p"], r["n"], r["s"], r["t"], r["lhs"], r["rhs"], r["passed"], r["equal"]) for r in rows)
    _write(out, "neoclassical.csv", "p,n,s,t,lhs,rhs,passed,equal", body)
    return VIOLATION if any(not r["passed"] for r in rows) else OK


def cmd_kershaw(cfg, out: Path) -> int:
    p_values = cfg.floats("run.p_values", (1.0, 2.0, 3.0)) if cfg else (1.0, 2.0, 3.0)
    n_max = int(cfg.get("run.N_max", "30")) if cfg else 30
    rows, bad = [], 0
    for p in sorted(p_values):
        rep = kershaw_ratio_check(p, n_max)
        bad += not rep["passed"]
        for N, ratio in zip(rep["N"], rep["ratios"]):
            rows.append((p, N, rep["log_a"][N], ratio, rep["C_ratio"], rep["passed"]))
    _write(out, "kershaw.csv", "p,N,log_a_next,ratio,C,passed", rows)
    return VIOLATION if bad else OK


def cmd_suite(cfg, out: Path, seed: int) -> int:
    checks = run_criteria(seed) + run_module_properties(seed)
    lines = [c.line() for c in checks]
    for line in lines:
        print(line)
    out.mkdir(parents=True, exist_ok=True)
    (out / "suite.txt").write_text("\n".join(lines) + "\n")
    return OK if all(c.passed for c in checks) else VIOLATION


COMMANDS: dict[str, Callable] = {
    "signature": cmd_signature,
    "shuffle-check": cmd_shuffle_check,
    "control": cmd_control,
    "params": cmd_params,
    "taylor": cmd_taylor,
    "decay": cmd_decay,
    "neoclassical": cmd_neoclassical,
    "kershaw": cmd_kershaw,
    "suite": cmd_suite,
}
NO_CONFIG = {"neoclassical", "kershaw", "suite"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(CONFIG)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pirough", description="Pi-graded signatures, controls and Taylor remainder experiments.")
    ap.add_argument("subcommand", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, default=None, help="key = value config file")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    ap.add_argument("--seed", type=int, default=None, help="random seed (default: config seed or 42)")
    ap.add_argument("--refine", type=int, default=None, help="dyadic grid refinement levels")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = None
        if args.config is not None:
            cfg = cfgmod.load(args.config, args.seed)
        elif args.subcommand not in NO_CONFIG:
            raise ConfigError(f"{args.subcommand} needs --config")
        if cfg is not None and args.refine is not None:
            if args.refine < 0:
                raise ConfigError("--refine must be nonnegative")
            cfg.refine = args.refine
        seed = args.seed if args.seed is not None else (cfg.seed if cfg else cfgmod.DEFAULT_SEED)
        if args.subcommand == "suite":
            return cmd_suite(cfg, args.out, seed)
        return COMMANDS[args.subcommand](cfg, args.out)
    except (ConfigError, InadmissibleError) as exc:
        print(f"pirough: config error: {exc}", file=sys.stderr)
        return CONFIG
    except DomainExitError as exc:
        print(f"pirough: {exc}", file=sys.stderr)
        return VIOLATION
    except PiRoughError as exc:
        print(f"pirough: config error: {exc}", file=sys.stderr)
        return CONFIG


if __name__ == "__main__":
    sys.exit(main())
