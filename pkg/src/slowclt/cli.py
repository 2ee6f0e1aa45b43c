"""Command-line front end.

    slowclt stable-eval --alpha 1 --gamma 1 --x 0
    slowclt sweep --family cubic:A=1 --scaling kk --n-min 1e4 --n-max 1e12 --per-decade 2 --out kk.csv
    slowclt bound-check --theorem 1 --family cubic:A=1 --scaling natural --C 0.9 --n-list 1e4,1e6,1e8
    slowclt prop-check --scaling powerlog:r=0.5 --eps 0 --kmax 40
    slowclt dichotomy --A 1 --n-min 1e4 --n-max 1e12
    slowclt mc-check --family cubic:A=1 --scaling natural --n 1000 --m 100000 --seed 1

Exit status: 0 on success, 1 on a failed check or numerical failure (a
JSON record goes to stderr), 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .fourier import FourierError, default_grid
from .harness import (DEFAULT_C, DEFAULT_THRESHOLD, CalibrationMissing, example_rate_dichotomy,
                      limit_law, measure_many, theorem1_rhs, theorem2_rhs, verify_both)
from .montecarlo import McConfig, crosscheck
from .scaling import NoRootError, gap, parse_scaling, proposition_divergence
from .stable import QuadratureError, StableLaw
from .summands import parse_family

__all__ = ["ConvergenceRecord", "FIELDS", "main", "run", "sweep_records"]

FIELDS = ("n", "a_n", "kolmogorov", "sup_density", "thm1_rhs", "thm2_rhs", "gap",
          "lognorm_kolmogorov", "family", "scaling", "grid", "gamma")


@dataclass(frozen=True)
class ConvergenceRecord:
    n: float
    a_n: float
    kolmogorov: float
    sup_density: float
    thm1_rhs: float
    thm2_rhs: float
    gap: float
    lognorm_kolmogorov: float
    family: str
    scaling: str
    grid: str
    gamma: float


def _g(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _csv_line(values) -> str:
    return ",".join(_g(v) for v in values)


def _n_values(n_min: float, n_max: float, per_decade: int) -> list[float]:
    if not 2 <= n_min <= n_max:
        raise ValueError("need 2 <= n-min <= n-max")
    lo, hi = math.log10(n_min), math.log10(n_max)
    k = int(math.floor((hi - lo) * per_decade + 1e-9))
    return [10.0 ** (lo + j / per_decade) for j in range(k + 1)]


def sweep_records(family_spec: str, scaling_spec: str, n_values, C: float = DEFAULT_C,
                  points: int = 2**20) -> tuple[list[ConvergenceRecord], dict]:
    fam = parse_family(family_spec)
    rule = parse_scaling(scaling_spec, alpha=fam.alpha)
    law = limit_law(fam, rule)
    grid = default_grid(fam, rule, n_values, law, points=points)
    got = measure_many(fam, rule, n_values, grid, law)
    gdesc = f"x_max={_g(grid.x_max)};points={grid.points}"
    rows = []
    for n in sorted(got):
        k, d, a_n = got[n]
        rows.append(ConvergenceRecord(
            n, a_n, k.value, d.value, theorem1_rhs(law, rule, n, C)[0],
            theorem2_rhs(law, rule, n, C)[0], gap(rule, n), k.value * math.log(n),
            fam.spec, rule.spec, gdesc, law.gamma))
    meta = {"family": fam.spec, "scaling": rule.spec, "alpha": rule.alpha,
            "gamma": law.gamma, "x_max": grid.x_max, "points": grid.points, "C": C,
            "center": getattr(fam, "center", ""), "version": __version__}
    return rows, meta


def _header(meta: dict) -> list[str]:
    return [f"# {k}={_g(v) if isinstance(v, float) else v}" for k, v in meta.items()]


def _cmd_stable_eval(a, out):
    law = StableLaw(a.alpha, a.gamma)
    print(f"density {_g(law.pdf(a.x))}", file=out)
    print(f"cdf {_g(law.cdf(a.x))}", file=out)
    if a.deriv:
        print(f"derivative {_g(law.pdf_deriv(a.x))}", file=out)
    return 0


def _cmd_sweep(a, out):
    ns = _n_values(a.n_min, a.n_max, a.per_decade)
    rows, meta = sweep_records(a.family, a.scaling, ns, a.C, a.points)
    lines = []
    if a.json:
        lines.append(json.dumps({"config": meta}))
        lines += [json.dumps(asdict(r)) for r in rows]
    else:
        lines += _header(meta)
        lines.append(",".join(FIELDS))
        lines += [_csv_line(asdict(r)[f] for f in FIELDS) for r in rows]
    text = "\n".join(lines) + "\n"
    if a.out in (None, "-"):
        out.write(text)
    else:
        with open(a.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def _cmd_bound_check(a, out):
    fam = parse_family(a.family)
    rule = parse_scaling(a.scaling, alpha=fam.alpha)
    ns = sorted(float(v) for v in a.n_list.split(","))
    res = verify_both(fam, rule, ns, a.C, threshold=a.threshold, points=a.points)
    r = res[a.theorem - 1]
    for line in _header({**r.metadata, "theorem": a.theorem}):
        print(line, file=out)
    print("n,lhs,rhs,z_star,C_used,margin,asserted", file=out)
    for c in r.checks:
        print(_csv_line([c.n, c.lhs, c.rhs, c.z_star, c.C_used, c.margin,
                         "yes" if c.asserted else "no"]), file=out)
    return 0 if r.passed else 1


def _cmd_prop_check(a, out):
    rule = parse_scaling(a.scaling)
    seq = proposition_divergence(rule, a.eps, a.kmax, n0=a.n0)
    print(f"# scaling={rule.spec}\n# eps={_g(a.eps)}\n# n0={_g(a.n0)}", file=out)
    print("k,log_n,value", file=out)
    for k, v in enumerate(seq):
        print(_csv_line([k, k * math.log(2.0) + math.log(a.n0), v]), file=out)
    return 0


def _cmd_dichotomy(a, out):
    ns = _n_values(a.n_min, a.n_max, a.per_decade)
    d = example_rate_dichotomy(a.A, ns, points=a.points)
    print(f"# A={_g(a.A)}", file=out)
    for name, fit in (("kk", d.kk), ("natural", d.natural)):
        lo, hi = fit.band
        print(f"# {name}: model={fit.model} c_hat={_g(fit.c_hat)} band=[{_g(lo)},{_g(hi)}] "
              f"residual={_g(fit.residual)}", file=out)
    print(f"# inconclusive={d.inconclusive}", file=out)
    print("n,d_kk,d_natural,kk_lognorm,natural_lognorm,ratio", file=out)
    for row in zip(d.n, d.d_kk, d.d_natural, d.kk.values, d.natural.values, d.ratio):
        print(_csv_line(row), file=out)
    return 0


def _cmd_mc_check(a, out):
    fam = parse_family(a.family)
    rule = parse_scaling(a.scaling, alpha=fam.alpha)
    cfg = McConfig(a.n, a.m, a.seed, a.confidence)
    r = crosscheck(fam, rule, cfg, a_scale=a.a_scale, points=a.points)
    rec = {"ks": r.ks, "half_width": r.half_width, "grid_tol": r.grid_tol,
           "symmetry_ks": r.symmetry_ks, "symmetric": r.symmetric, "passed": r.passed,
           **r.details}
    print(json.dumps(rec), file=out)
    return 0 if r.passed else 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slowclt", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stable-eval", help="symmetric stable density, cdf and derivative")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--deriv", action="store_true")
    s.set_defaults(fn=_cmd_stable_eval)

    s = sub.add_parser("sweep", help="distances to the limit law over a range of n")
    s.add_argument("--family", required=True)
    s.add_argument("--scaling", required=True)
    s.add_argument("--n-min", type=float, required=True)
    s.add_argument("--n-max", type=float, required=True)
    s.add_argument("--per-decade", type=int, default=1)
    s.add_argument("--out", default="-")
    s.add_argument("--json", action="store_true")
    s.add_argument("--C", type=float, default=DEFAULT_C)
    s.add_argument("--points", type=int, default=2**20)
    s.set_defaults(fn=_cmd_sweep)

    s = sub.add_parser("bound-check", help="check a lower bound at each n")
    s.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    s.add_argument("--family", required=True)
    s.add_argument("--scaling", required=True)
    s.add_argument("--C", type=float, default=DEFAULT_C)
    s.add_argument("--n-list", required=True)
    s.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    s.add_argument("--points", type=int, default=2**20)
    s.set_defaults(fn=_cmd_bound_check)

    s = sub.add_parser("prop-check", help="(log n_k)^(1+eps) |1 - L(n_k)/L(2 n_k)| along n_k = 2^k n0")
    s.add_argument("--scaling", required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--kmax", type=int, required=True)
    s.add_argument("--n0", type=float, default=2.0)
    s.set_defaults(fn=_cmd_prop_check)

    s = sub.add_parser("dichotomy", help="density rates of cubic-tail sums under two scalings")
    s.add_argument("--A", type=float, default=1.0)
    s.add_argument("--n-min", type=float, default=1e4)
    s.add_argument("--n-max", type=float, default=1e12)
    s.add_argument("--per-decade", type=int, default=2)
    s.add_argument("--points", type=int, default=2**20)
    s.set_defaults(fn=_cmd_dichotomy)

    s = sub.add_parser("mc-check", help="Monte Carlo cross-check of the inverted F_n")
    s.add_argument("--family", required=True)
    s.add_argument("--scaling", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, default=100000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--confidence", type=float, default=0.999)
    s.add_argument("--a-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    s.add_argument("--points", type=int, default=2**20)
    s.set_defaults(fn=_cmd_mc_check)
    return p


_NUMERICAL = (FourierError, QuadratureError, NoRootError, CalibrationMissing,
              ValueError, ArithmeticError, np.linalg.LinAlgError)


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = _parser().parse_args(argv)
    try:
        return args.fn(args, out)
    except _NUMERICAL as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc),
                          "command": args.command}), file=err)
        return 1


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
