"""Command-line front end.

Subcommands::

    pastvar eval   --dist SPEC --measure NAME --t T
    pastvar curve  --dist SPEC --measures A,B --t-min LO --t-max HI --n-points N
    pastvar verify --dist SPEC [--suite all|GROUP[,GROUP...]]
    pastvar mc     --dist SPEC --t T

Exit codes: 0 success, 1 a verification check failed, 2 bad arguments or
spec, 3 domain error, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import measures as ms
from . import properties as pr
from .distributions import PRHRFamily, monotonic_transform
from .exceptions import ConvergenceError, DomainError, IntegrandError, SpecParseError
from .mc import RNG_ALGORITHM, MCConfig, mc_inactivity_moments, mc_past_entropy, mc_past_varentropy
from .parsing import PHI_CATALOG, parse_spec
from .quadrature import QuadratureConfig

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_NUMERIC = 4

POINTWISE = "pointwise"
DERIVED = "derived"


@dataclass(frozen=True)
class Cell:
    """One evaluated measure: value, numerical error and how it was obtained."""

    value: float
    error: float
    method: str


def _from_measure(v: ms.MeasureValue) -> Cell:
    return Cell(v.value, v.numerical_error, v.method)


def _derivative(dist, t, kw, which) -> Cell:
    # first-order propagation of the past H/V errors through the identity
    h = ms.past_entropy(dist, t, **kw)
    q = ms.reversed_hazard(dist, t)
    if which == "entropy":
        value = ms.past_entropy_derivative(dist, t, **kw)
        err = q * h.numerical_error
        methods = {h.method}
    else:
        v = ms.past_varentropy(dist, t, **kw)
        value = ms.past_varentropy_derivative(dist, t, **kw)
        err = q * (v.numerical_error + 2 * abs(h.value + math.log(q)) * h.numerical_error)
        methods = {h.method, v.method}
    return Cell(value, err, ms.CLOSED_FORM if methods == {ms.CLOSED_FORM} else DERIVED)


def _measure_table(method, cfg, alpha):
    kw = {"method": method, "cfg": cfg}
    m = _from_measure

    def pointwise(fn):
        return lambda d, t: Cell(fn(d, t), 0.0, POINTWISE)

    return {
        "entropy": lambda d, t: m(ms.entropy(d, **kw)),
        "varentropy": lambda d, t: m(ms.varentropy(d, **kw)),
        "past-entropy": lambda d, t: m(ms.past_entropy(d, t, **kw)),
        "past-varentropy": lambda d, t: m(ms.past_varentropy(d, t, **kw)),
        "residual-entropy": lambda d, t: m(ms.residual_entropy(d, t, **kw)),
        "residual-varentropy": lambda d, t: m(ms.residual_varentropy(d, t, **kw)),
        "reversed-hazard": pointwise(ms.reversed_hazard),
        "cumulative-reversed-hazard": pointwise(ms.cumulative_reversed_hazard),
        "generalized-reversed-hazard": pointwise(
            lambda d, t: ms.generalized_reversed_hazard(d, t, alpha)),
        "mean-inactivity-time": lambda d, t: m(ms.mean_inactivity_time(d, t, **kw)),
        "variance-inactivity-time": lambda d, t: m(ms.variance_inactivity_time(d, t, **kw)),
        "past-entropy-derivative": lambda d, t: _derivative(d, t, kw, "entropy"),
        "past-varentropy-derivative": lambda d, t: _derivative(d, t, kw, "varentropy"),
        "prhr-past-entropy": lambda d, t: m(_prhr(ms.prhr_past_entropy, d, t, cfg)),
        "prhr-past-varentropy": lambda d, t: m(_prhr(ms.prhr_past_varentropy, d, t, cfg)),
    }


MEASURES = tuple(_measure_table("auto", None, 0.0))


def _prhr(fn, dist, t, cfg):
    if not isinstance(dist, PRHRFamily):
        raise DomainError("prhr-* measures need a spec ending in a prhr stage")
    return fn(dist, t, cfg=cfg)


def _evaluate(name, dist, t, args) -> Cell:
    cell = _measure_table(args.method, _quad_config(args), args.alpha)[name](dist, float(t))
    if not (math.isfinite(cell.value) and math.isfinite(cell.error)):
        raise ConvergenceError(f"{name} at t={t} evaluated to {cell.value} (error {cell.error})")
    return cell


def _quad_config(args) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol,
                            max_subdivisions=args.max_subdiv)


def _mc_config(args) -> MCConfig:
    return MCConfig(n_samples=args.mc_samples, seed=args.seed)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# --------------------------------------------------------------------------
# curve tables


@dataclass
class CurveTable:
    spec: str
    measures: list[str]
    rows: list[tuple[float, dict[str, Cell]]] = field(default_factory=list)

    def header(self) -> list[str]:
        cols = ["t"]
        for m in self.measures:
            cols += [m, f"{m}_err", f"{m}_method"]
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        for t, values in self.rows:
            line = [repr(float(t))]
            for m in self.measures:
                v = values[m]
                line += [repr(float(v.value)), repr(float(v.error)), v.method]
            writer.writerow(line)
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "version": __version__,
            "spec": self.spec,
            "measures": self.measures,
            "rows": [
                {"t": t, **{m: {"value": v.value, "error": v.error, "method": v.method}
                            for m, v in values.items()}}
                for t, values in self.rows
            ],
        }
        return json.dumps(payload, indent=2)


def build_curve(spec, dist, measures, t_grid, args, jobs=1) -> CurveTable:
    def row(t):
        return float(t), {m: _evaluate(m, dist, float(t), args) for m in measures}

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(row, t_grid))
    else:
        rows = [row(t) for t in t_grid]
    return CurveTable(spec, list(measures), rows)


# --------------------------------------------------------------------------
# verify suite

SUITES = ("derivatives", "relations", "characterizations", "transforms", "bounds", "prhr", "mc")


def _safe(name, fn):
    """Run one check; domain errors make it not applicable, numerical
    failures make it fail."""
    try:
        return fn()
    except DomainError as exc:
        return pr.CheckReport(name, False, False, 0.0, detail=f"not applicable: {exc}")
    except (ConvergenceError, IntegrandError) as exc:
        return pr.CheckReport(name, True, False, math.inf, detail=f"numerical failure: {exc}")


def _derivative_report(dist, grid, cfg):
    rh = [pr.check_entropy_derivative(dist, t, cfg=cfg) for t in grid]
    rv = [pr.check_varentropy_derivative(dist, t, cfg=cfg) for t in grid]
    return pr._report("derivative-identities", grid, np.maximum(rh, rv), pr.NUMERIC_TOL)


def _mc_report(dist, grid, cfg, mc_cfg):
    zs = []
    for t in grid:
        quad = ms.past_varentropy(dist, t, method="quadrature", cfg=cfg).value
        zs.append(abs(mc_past_varentropy(dist, t, mc_cfg).z_score(quad)))
    worst = max(zs)
    flag = " (flagged: 3-4 sigma)" if 3 < worst <= 4 else ""
    return pr.CheckReport("mc-two-oracle", True, worst <= 4.0, worst, tuple(grid), tuple(zs),
                          detail=f"max |z| over past varentropy{flag}")


def run_verify(dist, suites, args):
    cfg = _quad_config(args)
    grid = pr.default_t_grid(dist, 10)
    checks = []
    if "derivatives" in suites:
        checks.append(("derivative-identities", lambda: _derivative_report(dist, grid, cfg)))
    if "relations" in suites:
        checks.append(("reversed-hazard-relations",
                       lambda: pr.check_reversed_hazard_relations(dist, grid, cfg=cfg)))
    if "characterizations" in suites:
        checks.append(("constant-varentropy",
                       lambda: pr.check_constant_varentropy(dist, grid, cfg=cfg)))
        checks.append(("constant-sum-form",
                       lambda: pr.check_constant_sum_form(dist, args.c, grid, cfg=cfg)))

        def generalized():
            c = args.c
            if c is None:
                c = float(pr.entropy_hazard_sum(dist, grid, cfg).mean())
            return pr.check_generalized_hazard_equivalence(dist, c, grid, cfg=cfg)

        checks.append(("generalized-hazard-equivalence", generalized))
    if "transforms" in suites:
        a, b = 2.0, 1.0
        checks.append(("linear-transform",
                       lambda: pr.check_linear_transform(dist, a, b, [a * t + b for t in grid],
                                                         cfg=cfg)))

        def square():
            y = monotonic_transform(dist, *PHI_CATALOG["square"], label="square")
            return pr.check_monotonic_transform(y, [t * t for t in grid[::3]], cfg=cfg)

        checks.append(("monotonic-transform", square))
    if "bounds" in suites:
        checks.append(("omega-lower-bound", lambda: pr.check_lower_bound(dist, grid, cfg=cfg)))
        checks.append(("logconcave-upper-bound",
                       lambda: pr.check_upper_bound_logconcave(dist, grid, cfg=cfg)))
    if "prhr" in suites:
        checks.append(("prhr-dual-route", lambda: pr.check_prhr_dual_route(dist, 2.0, grid, cfg=cfg)))
    if "mc" in suites:
        mc_cfg = _mc_config(args)
        checks.append(("mc-two-oracle", lambda: _mc_report(dist, grid[::3], cfg, mc_cfg)))
    return [_safe(name, fn) for name, fn in checks]


# --------------------------------------------------------------------------
# subcommands


def cmd_eval(args) -> int:
    dist = parse_spec(args.dist)
    v = _evaluate(args.measure, dist, args.t, args)
    if args.format == "json":
        out = json.dumps({"spec": args.dist, "measure": args.measure, "t": args.t,
                          "value": v.value, "error": v.error, "method": v.method})
    else:
        out = (f"{args.measure}(t={_fmt(args.t)}) = {_fmt(v.value)}  "
               f"error={_fmt(v.error)}  method={v.method}")
    _emit(out, args.out)
    return EXIT_OK


def cmd_curve(args) -> int:
    dist = parse_spec(args.dist)
    measures = [m.strip() for m in args.measures.split(",") if m.strip()]
    unknown = [m for m in measures if m not in MEASURES]
    if unknown:
        raise SpecParseError(f"unknown measures {unknown}")
    if not 0 < args.t_min < args.t_max:
        raise DomainError("need 0 < t-min < t-max")
    if args.n_points < 2:
        raise DomainError("n-points must be >= 2")
    grid = np.linspace(args.t_min, args.t_max, args.n_points)
    table = build_curve(args.dist, dist, measures, grid, args, jobs=args.jobs)
    _emit(table.to_json() if args.format == "json" else table.to_csv(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    dist = parse_spec(args.dist)
    suites = SUITES if args.suite == "all" else tuple(s.strip() for s in args.suite.split(","))
    bad = [s for s in suites if s not in SUITES]
    if bad:
        raise SpecParseError(f"unknown suites {bad}; choose from {SUITES}")
    reports = run_verify(dist, suites, args)
    if args.format == "json":
        out = json.dumps([
            {"name": r.name, "applicable": r.applicable, "passed": r.passed,
             "max_residual": r.max_residual, "detail": r.detail}
            for r in reports
        ], indent=2)
    else:
        lines = [f"# {dist.name}", f"{'check':<28}{'applicable':<12}{'pass':<7}{'max_residual':<16}detail"]
        for r in reports:
            verdict = ("yes" if r.passed else "NO") if r.applicable else "-"
            lines.append(f"{r.name:<28}{'yes' if r.applicable else 'no':<12}{verdict:<7}"
                         f"{r.max_residual:<16.3e}{r.detail}")
        out = "\n".join(lines)
    _emit(out, args.out)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_CHECK_FAILED


def cmd_mc(args) -> int:
    dist = parse_spec(args.dist)
    cfg, mc_cfg = _quad_config(args), _mc_config(args)
    t = args.t
    m_mean, m_var = mc_inactivity_moments(dist, t, mc_cfg)
    rows = [
        ("past-entropy", ms.past_entropy(dist, t, cfg=cfg), mc_past_entropy(dist, t, mc_cfg)),
        ("past-varentropy", ms.past_varentropy(dist, t, cfg=cfg), mc_past_varentropy(dist, t, mc_cfg)),
        ("mean-inactivity-time", ms.mean_inactivity_time(dist, t, cfg=cfg), m_mean),
        ("variance-inactivity-time", ms.variance_inactivity_time(dist, t, cfg=cfg), m_var),
    ]
    if args.format == "json":
        out = json.dumps({
            "spec": args.dist, "t": t, "rng": RNG_ALGORITHM, "seed": mc_cfg.seed,
            "n_samples": mc_cfg.n_samples,
            "rows": [{"measure": n, "reference": v.value, "method": v.method,
                      "mc_mean": e.mean, "std_error": e.std_error, "z": e.z_score(v.value)}
                     for n, v, e in rows],
        }, indent=2)
    else:
        lines = [f"# rng={RNG_ALGORITHM} seed={mc_cfg.seed} n={mc_cfg.n_samples}",
                 f"{'measure':<26}{'reference':<20}{'mc_mean':<20}{'std_error':<14}z"]
        for n, v, e in rows:
            lines.append(f"{n:<26}{_fmt(v.value):<20}{_fmt(e.mean):<20}"
                         f"{e.std_error:<14.3e}{e.z_score(v.value):+.2f}")
        out = "\n".join(lines)
    _emit(out, args.out)
    return EXIT_OK


def _emit(text, path):
    if not text.endswith("\n"):
        text += "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# argument parsing


def _global_flags(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--abs-tol", type=float, default=d(1e-10), help="quadrature absolute tolerance")
    parser.add_argument("--rel-tol", type=float, default=d(1e-9), help="quadrature relative tolerance")
    parser.add_argument("--max-subdiv", type=int, default=d(2000), help="quadrature panel limit")
    parser.add_argument("--mc-samples", type=int, default=d(1_000_000), help="Monte Carlo sample size")
    parser.add_argument("--seed", type=int, default=d(20240101), help="Monte Carlo seed")
    parser.add_argument("--out", default=d(None), help="write output to this path instead of stdout")
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"),
                        help="output format (csv means plain text for eval/verify/mc)")
    parser.add_argument("--method", choices=("auto", "closed_form", "quadrature"), default=d("auto"),
                        help="closed forms for built-in families, or force quadrature")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pastvar", description="Past entropy, past varentropy and reversed-hazard measures of lifetimes.")
    parser.add_argument("--version", action="version", version=f"pastvar {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    common.add_argument("--dist", required=True, help='distribution spec, e.g. "family=power k=2"')

    p = sub.add_parser("eval", parents=[common], help="evaluate one measure at one time")
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0, help="for generalized-reversed-hazard")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("curve", parents=[common], help="tabulate measures over a uniform t grid")
    p.add_argument("--measures", required=True, help="comma-separated measure names")
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--n-points", type=int, default=50)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=1, help="threads used to fill rows")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", parents=[common], help="run the property checks")
    p.add_argument("--suite", default="all", help=f"all, or a comma list of {', '.join(SUITES)}")
    p.add_argument("--c", type=float, default=None,
                   help="constant for the characterization checks (default: estimated)")
    p.set_defaults(func=cmd_verify, alpha=0.0)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo cross-check at one time")
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_mc, alpha=0.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"pastvar: spec error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"pastvar: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, IntegrandError) as exc:
        print(f"pastvar: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"pastvar: invalid option: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
