"""Coulomb-fluid (equilibrium measure) description of the perturbed weight.

For v(x) = x - alpha ln x + t/x the density is single-cut on [a, b] and
both endpoints follow from the geometric mean X = sqrt(ab), the positive
root of a quartic.  Under t = s/N with N -> infinity the quartic collapses
to the cubic X^3 - alpha X^2 - s = 0 whose reciprocal root is the
algebraic part of the C potential.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from .errors import ConsistencyError, DomainError, QuadratureError
from .hankel import WeightParams
from .precision import PrecisionCtx, as_ctx, to_mpf

# Two ways the degree enters the scaling: 2n+alpha comes out of the fluid
# endpoint equations, 2n+1+alpha out of the exact finite-n recurrence.
CONVENTIONS = {"fluid": 0, "finite-n": 1}


def scaled_degree(n: int, alpha, convention: str = "fluid"):
    """2n + alpha (fluid) or 2n + 1 + alpha (finite-n)."""
    try:
        shift = CONVENTIONS[convention]
    except KeyError:
        raise DomainError(f"unknown convention {convention!r}; use one of {sorted(CONVENTIONS)}")
    return 2 * n + shift + alpha


@dataclass(frozen=True)
class FluidEndpoints:
    a: object
    b: object
    X: object
    n: int
    params: WeightParams
    convention: str = "fluid"

    @property
    def ntilde(self):
        return scaled_degree(self.n, self.params.alpha, self.convention)

    def residuals(self):
        """(X^2 - ab, sum equation, ratio equation, quartic), all as absolute values."""
        M = self.params.ctx.mp
        a, b, X = self.a, self.b, self.X
        alpha, t = self.params.alpha, self.params.t
        r_prod = abs(X * X - a * b)
        r_sum = abs(self.ntilde + t / X - (a + b) / 2)
        r_ratio = abs((a + b) * t / (2 * X ** 3) + alpha / X - 1)
        r_quart = abs(quartic(X, self.n, self.params, self.convention))
        return tuple(M.mpf(r) for r in (r_prod, r_sum, r_ratio, r_quart))


def quartic(X, n: int, params: WeightParams, convention: str = "fluid"):
    alpha, t = params.alpha, params.t
    N = scaled_degree(n, alpha, convention)
    return (((X - alpha) * X) * X - N * t) * X - t * t


def _sign_changes(coeffs) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def solve_endpoints(n: int, params: WeightParams, convention: str = "fluid") -> FluidEndpoints:
    """Support [a, b] of the equilibrium density for degree n.

    The positive root of the quartic is bracketed on (0, Cauchy bound],
    bisected to a few digits and polished by Newton.  Descartes' rule is
    applied at run time: for t > 0 the coefficient signs (+, -, 0, -, -)
    allow exactly one positive root, and anything else is reported.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    n = int(n)
    params.require_positive_alpha()
    ctx = params.ctx
    M = ctx.working(32)
    alpha, t = M.mpf(params.alpha), M.mpf(params.t)
    N = scaled_degree(n, alpha, convention)
    if t == 0:
        X = alpha
    else:
        coeffs = [M.one, -alpha, M.zero, -N * t, -t * t]
        if _sign_changes(coeffs) != 1:
            raise ConsistencyError("quartic does not have exactly one positive root")
        f = lambda x: (((x - alpha) * x) * x - N * t) * x - t * t
        df = lambda x: ((4 * x - 3 * alpha) * x) * x - N * t
        lo, hi = M.zero, 1 + max(alpha, N * t, t * t)
        if not (f(lo) < 0 < f(hi)):
            raise ConsistencyError("no bracket for the positive quartic root")
        for _ in range(60):
            mid = (lo + hi) / 2
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        X = (lo + hi) / 2
        for _ in range(200):
            dx = f(X) / df(X)
            X -= dx
            if abs(dx) <= abs(X) * M.eps * 4:
                break
        else:
            raise ConsistencyError("Newton polish of the quartic root did not settle")
        if not lo <= X <= hi:
            raise ConsistencyError("Newton left the bisection bracket")
    half_sum = N + t / X
    b = half_sum + M.sqrt(half_sum * half_sum - X * X)
    a = X * X / b
    return FluidEndpoints(ctx.round(a), ctx.round(b), ctx.round(X), n, params, convention)


def density(x, ep: FluidEndpoints):
    """Equilibrium density sigma(x) on [a, b]."""
    M = ep.params.ctx.mp
    x = to_mpf(M, x)
    a, b = ep.a, ep.b
    if not a <= x <= b:
        raise DomainError(f"x = {x} lies outside the support [{a}, {b}]")
    X = M.sqrt(a * b)
    alpha, t = ep.params.alpha, ep.params.t
    bracket = (alpha / X + t * (a + b) / (2 * X ** 3)) / x + t / (x * x * X)
    return M.sqrt((b - x) * (x - a)) / (2 * M.pi) * bracket


def _arcsine_quad(g, a, b, ctx: PrecisionCtx, tol=None):
    """Integral of g(x)/sqrt((b-x)(x-a)) over [a, b] via x = a + (b-a)sin^2(th).

    The substitution turns the inverse square roots into the constant 2, so
    the remaining integrand on [0, pi/2] is smooth.
    """
    M = ctx.mp
    tol = ctx.tol if tol is None else tol
    d = b - a
    val, err = M.quad(lambda th: 2 * g(a + d * M.sin(th) ** 2), [0, M.pi / 4, M.pi / 2], error=True)
    if err > tol * max(1, abs(val)):
        raise QuadratureError(f"arcsine quadrature error {M.nstr(err, 3)} above tolerance", achieved=err)
    return val


def normalization(ep: FluidEndpoints, ctx: PrecisionCtx | None = None):
    """Total mass of the density; equals n for consistent endpoints."""
    ctx = as_ctx(ctx or ep.params.ctx)
    M = ctx.mp
    a, b = M.mpf(ep.a), M.mpf(ep.b)
    X = M.sqrt(a * b)
    alpha, t = M.mpf(ep.params.alpha), M.mpf(ep.params.t)
    # sigma = (b-x)(x-a) * bracket / (2 pi sqrt((b-x)(x-a)))
    def g(x):
        bracket = (alpha / X + t * (a + b) / (2 * X ** 3)) / x + t / (x * x * X)
        return (b - x) * (x - a) * bracket / (2 * M.pi)
    return ctx.round(_arcsine_quad(g, a, b, ctx))


def density_csv(ep: FluidEndpoints, points: int = 101) -> str:
    """Density profile on an equispaced grid, columns x, sigma."""
    M = ep.params.ctx.mp
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "sigma"])
    digits = M.dps + 2
    for k in range(points):
        x = ep.a + (ep.b - ep.a) * k / (points - 1) if k < points - 1 else ep.b
        w.writerow([M.nstr(x, digits), M.nstr(density(x, ep), digits)])
    return buf.getvalue()


def cubic_limit_root(s, alpha, ctx: PrecisionCtx | None = None):
    """Real root C~ = 1/X of X^3 - alpha X^2 - s = 0, from the radical form.

    The two radical terms cancel to about 1/alpha as s -> 0, costing roughly
    log2(1/s) bits, so the evaluation runs with that many guard bits.  A
    Newton iteration on the cubic provides the second route; disagreement
    beyond ten times the target tolerance is an error.
    """
    ctx = as_ctx(ctx)
    M0 = ctx.mp
    s = to_mpf(M0, s)
    alpha = to_mpf(M0, alpha)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if alpha < 0:
        raise DomainError(f"alpha must be non-negative, got {alpha}")
    guard = 32 + max(0, int(-M0.log(s, 2))) * 2
    M = ctx.working(guard)
    s, alpha = M.mpf(s), M.mpf(alpha)
    if alpha == 0:
        closed = M.cbrt(s) ** -1
    else:
        first = -M.cbrt(2) * alpha * M.cbrt(27 * s ** 2 + M.sqrt(729 * s ** 4 + 108 * alpha ** 3 * s ** 3)) ** -1
        second = M.cbrt(9 * s ** 2 + M.sqrt(81 * s ** 4 + 12 * s ** 3 * alpha ** 3)) / (M.cbrt(18) * s)
        closed = first + second
    newton = _cubic_newton(s, alpha, M)
    if abs(closed - newton) > 10 * ctx.tol * abs(newton):
        raise ConsistencyError(f"radical form {closed} and Newton root {newton} disagree")
    return ctx.round(closed)


def _cubic_newton(s, alpha, M):
    # X^3 - alpha X^2 - s is increasing past 2 alpha/3 and X > alpha there
    X = max(alpha, M.cbrt(s)) + M.cbrt(s)
    for _ in range(500):
        f = (X - alpha) * X * X - s
        dx = f / ((3 * X - 2 * alpha) * X)
        X -= dx
        if abs(dx) <= abs(X) * M.eps * 4:
            return 1 / X
    raise ConsistencyError("Newton iteration on the cubic did not converge")


def appendix_integrals(a, b, ctx: PrecisionCtx | None = None):
    """Six arcsine-weighted integrals paired with their closed forms.

    Returns a list of (numeric, closed_form) for the weights
    1, x, 1/x, 1/x^2, ln x and ln(x)/x.
    """
    ctx = as_ctx(ctx)
    M = ctx.mp
    a, b = to_mpf(M, a), to_mpf(M, b)
    if not 0 < a < b:
        raise DomainError(f"need 0 < a < b, got a={a}, b={b}")
    pi = M.pi
    ra, rb, X = M.sqrt(a), M.sqrt(b), M.sqrt(a * b)
    rows = [
        (lambda x: 1, pi),
        (lambda x: x, (a + b) * pi / 2),
        (lambda x: 1 / x, pi / X),
        (lambda x: 1 / x ** 2, (a + b) * pi / (2 * X ** 3)),
        (lambda x: M.log(x), 2 * pi * M.log((ra + rb) / 2)),
        (lambda x: M.log(x) / x, 2 * pi / X * M.log(2 * X / (ra + rb))),
    ]
    return [(_arcsine_quad(g, a, b, ctx), exact) for g, exact in rows]


def verify_appendix_integrals(a, b, ctx: PrecisionCtx | None = None) -> list:
    """Absolute residuals of the six identities at (a, b)."""
    ctx = as_ctx(ctx)
    return [ctx.round(abs(num - exact)) for num, exact in appendix_integrals(a, b, ctx)]


def scaled_root_error(n: int, s, alpha, ctx: PrecisionCtx | None = None,
                      convention: str = "fluid"):
    """|1/X(n, t) - C~(s)| with t = s / (2n + alpha).

    With the fluid convention on both sides the substituted quartic reads
    X^4 - alpha X^3 - s X - s^2/N^2 = 0, so the gap closes like 1/N^2;
    mixing conventions (t scaled by 2n+1+alpha) leaves an O(1/N) term.
    """
    ctx = as_ctx(ctx)
    M = ctx.mp
    s, alpha = to_mpf(M, s), to_mpf(M, alpha)
    t = s / scaled_degree(n, alpha, "fluid")
    ep = solve_endpoints(n, WeightParams(alpha, t, ctx), convention)
    return ctx.round(abs(1 / ep.X - cubic_limit_root(s, alpha, ctx)))


def endpoint_table(ns: Sequence[int], params: WeightParams, convention: str = "fluid"):
    return [solve_endpoints(n, params, convention) for n in ns]
