"""Command-line front end.

Every number is written as a decimal string with enough digits to
round-trip at the working precision; exact rationals are written as
"p/q".  Exit status: 0 on success, 1 when a computation is refused or a
verification check fails, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import mpmath

from . import asymptotics, coulomb_fluid, hankel, painleve, series, verification
from .errors import LaguerreLabError
from .precision import DEFAULT_BITS, PrecisionCtx

SERIES_KINDS = {
    "c-small": series.c_small_series,
    "c-large": series.c_large_series,
    "h-small": series.h_small_series,
    "h-large": series.h_large_series,
    "delta-small": series.delta_log_small_series,
    "delta-large": series.delta_log_large_series,
    "ratio": series.ratio_expansion,
    "ctilde-small": lambda a, m: series.ctilde_series(a, m, series.ZERO),
    "ctilde-large": lambda a, m: series.ctilde_series(a, m, series.INFINITY),
}


class Emitter:
    """Number formatting bound to one precision."""

    def __init__(self, ctx: PrecisionCtx):
        self.ctx = ctx
        # shortest digit count that round-trips a mantissa of ctx.bits bits
        self.digits = int(ctx.bits * 0.30103) + 2

    def num(self, x) -> str:
        if isinstance(x, Fraction):
            return str(x)
        if isinstance(x, int):
            return str(x)
        x = self.ctx.mp.mpf(x)
        if mpmath.isfinite(x) and x == mpmath.floor(x) and abs(x) < mpmath.mpf(2) ** self.ctx.bits:
            return str(int(x))
        return mpmath.nstr(x, self.digits)

    def nums(self, xs) -> list:
        return [self.num(x) for x in xs]


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _alpha(text: str):
    """Parse alpha as an exact rational ("1/2", "0.5", "3")."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _bits(text: str) -> int:
    v = int(text)
    if v < 64:
        raise argparse.ArgumentTypeError("bits must be >= 64")
    return v


def _tol(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("tol must lie in (0, 1)")
    return v


# ---------------------------------------------------------------- commands


def cmd_moments(args, ctx, em):
    p = hankel.WeightParams(args.alpha, args.t, ctx, allow_nonpositive_alpha=True)
    if args.count is None:
        mu = hankel.moment(args.j, p)
        if args.format == "csv":
            return _csv(["j", "mu"], [[args.j, em.num(mu)]])
        return _json({"mu": em.num(mu)})
    mv = hankel.moments(args.count, p)
    if args.format == "csv":
        return _csv(["j", "mu"], [[j, em.num(m)] for j, m in enumerate(mv.mu)])
    return _json({"mu": em.nums(mv.mu)})


def cmd_hankel(args, ctx, em):
    p = hankel.WeightParams(args.alpha, args.t, ctx)
    ld = hankel.hankel_det(args.n, p, args.method)
    if args.format == "csv":
        return _csv(["n", "log_det", "sign"], [[args.n, em.num(ld.log), ld.sign]])
    return _json({"n": args.n, "log_det": em.num(ld.log), "sign": ld.sign})


def cmd_recurrence(args, ctx, em):
    p = hankel.WeightParams(args.alpha, args.t, ctx)
    rd = hankel.recurrence_coeffs(args.n, p, args.method)
    if args.format == "csv":
        rows = [[k, em.num(rd.a[k]), em.num(rd.b[k]), em.num(rd.h[k])] for k in range(len(rd.a))]
        return _csv(["k", "alpha_k", "beta_k", "h_k"], rows)
    return _json({"n": rd.n, "alpha": em.nums(rd.a), "beta": em.nums(rd.b), "h": em.nums(rd.h)})


def cmd_ode(args, ctx, em):
    sol = painleve.solve_c(args.alpha, args.s_max, args.tol, ctx)
    if args.format == "csv":
        return sol.to_csv(em.digits)
    rows = [em.nums(r) for r in zip(sol.grid, sol.C, sol.Cp, sol.lnDelta, sol.Hcal)]
    return _json({"header": sol.header(), "columns": ["s", "C", "Cp", "lnDelta", "Hcal"], "rows": rows})


def cmd_series(args, ctx, em):
    ser = SERIES_KINDS[args.kind](args.alpha, args.terms)
    if args.format == "csv":
        rows = [[str(e), em.num(c)] for e, c in ser.terms]
        if ser.log_coeff is not None:
            rows.append(["log", em.num(ser.log_coeff)])
        return _csv(["exponent", "coefficient"], rows)
    return _json(ser.to_json())


def cmd_fluid(args, ctx, em):
    p = hankel.WeightParams(args.alpha, args.t, ctx)
    ep = coulomb_fluid.solve_endpoints(args.n, p, args.convention)
    if args.format == "csv":
        return coulomb_fluid.density_csv(ep, args.points)
    doc = {
        "n": ep.n,
        "convention": ep.convention,
        "a": em.num(ep.a),
        "b": em.num(ep.b),
        "X": em.num(ep.X),
        "residuals": em.nums(ep.residuals()),
    }
    if p.t > 0 or p.alpha > 0:
        doc["normalization"] = em.num(coulomb_fluid.normalization(ep))
    return _json(doc)


def cmd_asymptotics(args, ctx, em):
    rows = asymptotics.convergence_table(args.n, args.s, args.alpha, ctx)
    if args.format == "csv":
        return asymptotics.convergence_csv(rows, ctx)
    return _json({
        "alpha": str(args.alpha),
        "s": em.num(rows[0].s) if rows else None,
        "c2": em.num(asymptotics.c2_constant(args.alpha, ctx)),
        "c1_conjectured": em.num(asymptotics.c1_conjectured(args.alpha, ctx)),
        "rows": [
            {"n": r.n, "t": em.num(r.t), "exact": em.num(r.exact),
             "asymptotic": em.num(r.asymptotic), "corollary": em.num(r.corollary)}
            for r in rows
        ],
    })


def cmd_verify(args, ctx, em):
    only = None
    if args.only:
        only = [int(k) for k in args.only.split(",")]
        unknown = [k for k in only if k not in verification.CHECKS]
        if unknown:
            raise LaguerreLabError(f"unknown criteria: {unknown}")
    results = verification.run_suite(ctx, args.alpha, only)
    args._failed = not all(r.passed for r in results)
    if args.format == "csv":
        return _csv(["criterion", "passed", "measured", "bound", "title"],
                    [[r.criterion, r.passed, r.measured, r.bound, r.title] for r in results])
    if args.report == "text":
        lines = []
        for r in results:
            lines.append(r.line())
            lines.extend("    " + d for d in r.details)
        n_ok = sum(r.passed for r in results)
        lines.append(f"{n_ok}/{len(results)} criteria passed")
        return "\n".join(lines) + "\n"
    return _json({"alpha": str(args.alpha), "bits": ctx.bits,
                  "results": [r.to_json() for r in results]})


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=_bits, default=DEFAULT_BITS,
                        help="working precision in bits (default from PERTURBED_LAGUERRE_BITS or 256)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")

    parser = argparse.ArgumentParser(
        prog="perturbed-laguerre",
        description="Hankel determinants, Painleve III and Coulomb-fluid computations "
                    "for the weight x^alpha exp(-x - t/x).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="moments mu_j(t)")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--t", type=_alpha, default=Fraction(0))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--j", type=int)
    g.add_argument("--count", type=_positive_int)
    p.set_defaults(func=cmd_moments)

    for name, func, helptext in (("hankel", cmd_hankel, "ln of the Hankel determinant D_n(t)"),
                                 ("recurrence", cmd_recurrence, "recurrence coefficients")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--alpha", type=_alpha, required=True)
        p.add_argument("--t", type=_alpha, default=Fraction(0))
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--method", choices=("cholesky", "chebyshev"), default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("ode", parents=[common], help="integrate the C potential")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--s-max", type=_alpha, required=True)
    p.add_argument("--tol", type=_tol, default=painleve.DEFAULT_TOL)
    p.set_defaults(func=cmd_ode, default_format="csv")

    p = sub.add_parser("series", parents=[common], help="exact series coefficients")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--kind", choices=sorted(SERIES_KINDS), required=True)
    p.add_argument("--terms", type=_positive_int, default=series.DEFAULT_TERMS)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("fluid", parents=[common], help="equilibrium-measure endpoints and density")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--t", type=_alpha, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--convention", choices=sorted(coulomb_fluid.CONVENTIONS), default="fluid",
                   help="degree scaling: fluid = 2n+alpha, finite-n = 2n+1+alpha")
    p.add_argument("--points", type=_positive_int, default=101)
    p.set_defaults(func=cmd_fluid)

    p = sub.add_parser("asymptotics", parents=[common], help="P_n(0) ratio against its asymptotics")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--s", type=_alpha, required=True)
    p.add_argument("--n", type=_positive_int, nargs="+", required=True)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--alpha", type=_alpha, default=Fraction(1, 2))
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--report", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = getattr(args, "default_format", "json")
    ctx = PrecisionCtx(args.bits)
    em = Emitter(ctx)
    args._failed = False
    try:
        text = args.func(args, ctx, em)
    except LaguerreLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 1 if args._failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
