"""Large-n behaviour of the orthogonal polynomials at the origin.

Inside this module the fluid scaling N = 2n + alpha is used for the
endpoints.  Only :func:`pn0_ratio_check` talks to the exact finite-n engine
and the double-scaled determinant, which use t = s / (2n + 1 + alpha).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .coulomb_fluid import FluidEndpoints, solve_endpoints
from .errors import DomainError
from .hankel import WeightParams, log_pn0_ratio
from .painleve import cached_solution
from .precision import PrecisionCtx, as_ctx, to_mpf
from .series import alpha_value, eval_series, ratio_expansion
from .special_functions import barnes_g_log, log_gamma

# ratio_expansion(alpha, RATIO_TERMS) stops at s^(-4/3)
RATIO_TERMS = 7


@dataclass(frozen=True)
class OriginAsymptotics:
    log_exp_mS1: object
    log_exp_mS2: object
    log_pn0: object
    n: int
    params: WeightParams


def s1_at_zero(ep: FluidEndpoints, ctx: PrecisionCtx | None = None):
    """ln exp(-S1(0)) = ln( [(b/a)^(1/4) + (a/b)^(1/4)] / 2 )."""
    ctx = as_ctx(ctx or ep.params.ctx)
    M = ctx.mp
    a, b = M.mpf(ep.a), M.mpf(ep.b)
    if not 0 < a <= b:
        raise DomainError(f"need 0 < a <= b, got a={a}, b={b}")
    r = M.root(b / a, 4)
    return ctx.round(M.log((r + 1 / r) / 2))


def s1_asymptotic(n: int, t, ctx: PrecisionCtx | None = None):
    """ln of 2^(-1/6) n^(1/3) t^(-1/6)."""
    ctx = as_ctx(ctx)
    M = ctx.mp
    t = to_mpf(M, t)
    return ctx.round(-M.log(2) / 6 + M.log(n) / 3 - M.log(t) / 6)


def s2_at_zero(n: int, params: WeightParams, ep: FluidEndpoints | None = None):
    """ln |exp(-S2(0))| from the closed form in the endpoints.

    The sign (-1)^n is left out.  Requires t > 0, since the t/x part of the
    potential is what produces the closed form.
    """
    if not params.t > 0:
        raise DomainError("s2_at_zero needs t > 0")
    if ep is None:
        ep = solve_endpoints(n, params)
    ctx = params.ctx
    M = ctx.working(16)
    alpha, t = M.mpf(params.alpha), M.mpf(params.t)
    X = M.sqrt(M.mpf(ep.a) * M.mpf(ep.b))
    ab = X * X
    first = n * M.log(n + alpha / 2 + t / (2 * X) + X / 2)
    second = alpha * M.log(n / X + alpha / (2 * X) + t / (2 * ab) + M.mpf(1) / 2)
    third = -n - alpha / 2 - t / X + X / 2 + (n + alpha / 2) * t / ab + t * t / (2 * ab * X)
    return ctx.round(first + second + third)


def s2_asymptotic(n: int, t, alpha, ctx: PrecisionCtx | None = None):
    """n ln n - n + 3 2^(-2/3) (nt)^(1/3) + (2 alpha/3) ln n - (alpha/3) ln 2t."""
    ctx = as_ctx(ctx)
    M = ctx.mp
    t, alpha = to_mpf(M, t), to_mpf(M, alpha)
    val = (n * M.log(n) - n + 3 * M.cbrt(M.mpf(n) * t / 4)
           + 2 * alpha / 3 * M.log(n) - alpha / 3 * M.log(2 * t))
    return ctx.round(val)


def pn0_asymptotic(n: int, t, alpha, ctx: PrecisionCtx | None = None):
    """Leading large-n form of ln (-1)^n P_n(0; t, alpha)."""
    ctx = as_ctx(ctx)
    M = ctx.mp
    t, alpha = to_mpf(M, t), to_mpf(M, alpha)
    val = (n * M.log(n) - n + 3 * M.cbrt(M.mpf(n) * t / 4)
           + (1 + 2 * alpha) / 3 * M.log(n) - (M.mpf(1) / 6 + alpha / 3) * M.log(2 * t))
    return ctx.round(val)


def origin_asymptotics(n: int, params: WeightParams) -> OriginAsymptotics:
    ep = solve_endpoints(n, params)
    l1 = s1_at_zero(ep)
    l2 = s2_at_zero(n, params, ep)
    return OriginAsymptotics(l1, l2, l1 + l2, n, params)


def c2_constant(alpha, ctx: PrecisionCtx | None = None):
    """ln( Gamma(1+alpha) / sqrt(2 pi) )."""
    ctx = as_ctx(ctx)
    M = ctx.working(16)
    alpha = to_mpf(M, alpha)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return ctx.round(M.mpf(log_gamma(1 + alpha, PrecisionCtx(M.prec))) - M.log(2 * M.pi) / 2)


def c1_conjectured(alpha, ctx: PrecisionCtx | None = None):
    """ln( G(1+alpha) / (2 pi)^(alpha/2) ) with G the Barnes function."""
    ctx = as_ctx(ctx)
    M = ctx.working(16)
    alpha = to_mpf(M, alpha)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return ctx.round(M.mpf(barnes_g_log(1 + alpha, PrecisionCtx(M.prec))) - alpha / 2 * M.log(2 * M.pi))


@dataclass(frozen=True)
class RatioCheck:
    n: int
    s: object
    t: object
    exact: object
    asymptotic: object
    corollary: object


def pn0_ratio_check(n: int, s, alpha, ctx: PrecisionCtx | None = None,
                    method: str | None = None) -> RatioCheck:
    """Exact ln[P_n(0; t)/P_n(0; 0)] against its two large-s descriptions.

    t = s/(2n+1+alpha) follows the double-scaling convention.  The
    asymptotic value is written in 2nt, the variable in which the large-n
    estimate is derived, and the corollary evaluates the large-s series of
    ln Delta(s, alpha+1) - ln Delta(s, alpha) with its constant set to c2.
    """
    ctx = as_ctx(ctx)
    M = ctx.mp
    s = to_mpf(M, s)
    a = alpha_value(alpha)
    al = to_mpf(M, a)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    t = s / (2 * n + 1 + al)
    if t > 2:
        raise DomainError(f"t = {t} exceeds 2; take n larger")
    exact = log_pn0_ratio(n, t, al, ctx, method)
    x = 2 * n * t
    c2 = c2_constant(al, ctx)
    asym = c2 + 3 * M.cbrt(x) / 2 - (1 + 2 * al) / 6 * M.log(x)
    corollary = M.nan
    if s >= 1:
        corollary, _ = eval_series(ratio_expansion(a, RATIO_TERMS), s, ctx,
                                   constants={"c2": c2})
    return RatioCheck(n, s, t, exact, ctx.round(asym), ctx.round(corollary))


def convergence_table(ns: Sequence[int], s, alpha, ctx: PrecisionCtx | None = None) -> list:
    return [pn0_ratio_check(n, s, alpha, ctx) for n in ns]


def convergence_csv(rows: Sequence[RatioCheck], ctx: PrecisionCtx | None = None) -> str:
    """Columns n, exact, asymptotic, difference."""
    ctx = as_ctx(ctx)
    M = ctx.mp
    digits = M.dps + 2
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "exact", "asymptotic", "difference"])
    for r in rows:
        w.writerow([r.n, M.nstr(r.exact, digits), M.nstr(r.asymptotic, digits),
                    M.nstr(r.exact - r.asymptotic, digits)])
    return buf.getvalue()


def fit_constant_c2(alpha, s_grid: Sequence, ctx: PrecisionCtx | None = None, tol=1e-30):
    """c2 from integrated ln Delta(s, alpha+1) - ln Delta(s, alpha).

    Subtracts the non-constant large-s terms through s^(-4/3) and returns
    (mean, spread) over the grid.
    """
    ctx = as_ctx(ctx)
    M = ctx.mp
    a = alpha_value(alpha)
    grid = [to_mpf(M, s) for s in s_grid]
    if not grid or min(grid) < 50:
        raise DomainError("the c2 fit needs a non-empty grid with s >= 50")
    lo = cached_solution(a, max(grid), ctx, tol)
    hi = cached_solution(a + 1, max(grid), ctx, tol)
    expansion = ratio_expansion(a, RATIO_TERMS)
    est = []
    for s in grid:
        value, _ = eval_series(expansion, s, ctx, constants={"c2": 0})
        est.append(hi.delta(s) - lo.delta(s) - value)
    return ctx.round(M.fsum(est) / len(est)), ctx.round(max(est) - min(est))
