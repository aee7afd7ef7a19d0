"""The double-scaled system: C potential, ln Delta and H.

C solves

    C'' = C'^2/C - C'/s + C^2/s + alpha/s^2 - 1/(s^2 C),   C(0) = 1/alpha,

and H = (s C'/C)^2/4 - s C/2 - (1/C - alpha)^2/4 is s d(ln Delta)/ds.

Near s = 0 the regular solutions form a one-parameter family
C = 1/alpha + k s^alpha + O(s) (for non-integer alpha); the pure power
series is the member k = 0 and, for alpha < 1 at least, runs into a pole
at finite s.  The solver therefore seeds from the branch with the limiting
value of k, see :func:`perturbed_laguerre.series.branch_constant`.

The integrated state is (C, C', ln Delta, K) with K' = -C/2.  Since
H' = -C/2 holds along every solution, the difference K - H(C, C') is a
non-trivial check on the accumulated integration error.
"""

from __future__ import annotations

import csv
import io
import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, FitQualityError, SeriesError, SingularityError
from .gbs import integrate
from .precision import PrecisionCtx, as_ctx, to_mpf
from .series import (
    alpha_value,
    c_regular_series,
    delta_log_large_series,
    delta_log_regular_series,
    eval_series,
)

DEFAULT_TOL = 1e-20


def _seed_point(a: Fraction) -> Fraction:
    return min(Fraction(1, 100), a**3 / 10)


# ---------------------------------------------------------------- algebra


def hcal_from_c(s, C, Cp, alpha):
    return (s * Cp / C) ** 2 / 4 - s * C / 2 - (1 / C - alpha) ** 2 / 4


def c_second(s, C, Cp, alpha):
    return Cp**2 / C - Cp / s + C**2 / s + alpha / s**2 - 1 / (s**2 * C)


def c_third(s, C, Cp, alpha):
    """C''' by differentiating the C equation once more."""
    C2 = c_second(s, C, Cp, alpha)
    f_s = Cp / s**2 - C**2 / s**2 - 2 * alpha / s**3 + 2 / (s**3 * C)
    f_c = -Cp**2 / C**2 + 2 * C / s + 1 / (s**2 * C**2)
    f_cp = 2 * Cp / C - 1 / s
    return f_s + f_c * Cp + f_cp * C2


def hcal_derivatives(s, C, Cp, alpha):
    """(H, H', H'') from the H identity differentiated through the C equation."""
    C2 = c_second(s, C, Cp, alpha)
    C3 = c_third(s, C, Cp, alpha)
    P = s * Cp / C
    P1 = Cp / C + s * C2 / C - s * Cp**2 / C**2
    P2 = (C2 / C - Cp**2 / C**2) + (C2 / C + s * C3 / C - s * C2 * Cp / C**2) \
        - (Cp**2 / C**2 + 2 * s * Cp * C2 / C**2 - 2 * s * Cp**3 / C**3)
    w = 1 / C - alpha
    H = P**2 / 4 - s * C / 2 - w**2 / 4
    H1 = P * P1 / 2 - C / 2 - s * Cp / 2 + w * Cp / (2 * C**2)
    H2 = (P1**2 + P * P2) / 2 - Cp - s * C2 / 2 \
        + (-Cp**2 / C**4 + w * (C2 / C**2 - 2 * Cp**2 / C**3)) / 2
    return H, H1, H2


def sigma_form_residual(s, H, H1, H2, alpha):
    """Relative residual of (sH'')^2 + 4H'^2(sH' - H) - (alpha H' + 1/2)^2."""
    terms = ((s * H2) ** 2, 4 * H1**2 * (s * H1 - H), -(alpha * H1 + 0.5) ** 2)
    return abs(sum(terms)) / max(1, *(abs(x) for x in terms))


def okamoto_residual(s, H, H1, H2, alpha):
    """Okamoto normal form at s/2 for HH(x) = H(2x) + alpha^2/4.

    (x HH'')^2 + 4 HH'^2 (x HH' - HH) - 2 alpha HH' - 1 at x = s/2, with
    HH' = 2 H'(s) and HH'' = 4 H''(s).
    """
    x = s / 2
    K, K1, K2 = H + alpha**2 / 4, 2 * H1, 4 * H2
    terms = ((x * K2) ** 2, 4 * K1**2 * (x * K1 - K), -2 * alpha * K1, -1)
    return abs(sum(terms)) / max(1, *(abs(t) for t in terms))


def lesser_p3_residual(s, C, Cp, alpha):
    """Residual of Y'' = Y'^2/Y - Y'/x + Y^2/x - 1/Y + 2 alpha/x.

    Y(x) = (x/2) C(x^2/8) with x = sqrt(8 s), so Y' = C/2 + x^2 C'/8 and
    Y'' = 3 x C'/8 + x^3 C''/32.
    """
    x = (8 * s).context.sqrt(8 * s)
    C2 = c_second(s, C, Cp, alpha)
    Y = x * C / 2
    Y1 = C / 2 + x * x * Cp / 8
    Y2 = 3 * x * Cp / 8 + x**3 * C2 / 32
    terms = (Y1**2 / Y, -Y1 / x, Y**2 / x, -1 / Y, 2 * alpha / x)
    return abs(Y2 - sum(terms)) / max(1, abs(Y2), *(abs(t) for t in terms))


def c_equation_residual(s, C, Cp, C2, alpha):
    """Relative residual of the C equation for given (C, C', C'')."""
    terms = (Cp**2 / C, -Cp / s, C**2 / s, alpha / s**2, -1 / (s**2 * C))
    return abs(C2 - sum(terms)) / max(1, abs(C2), *(abs(t) for t in terms))


def algebraic_solution(alpha: int):
    """Closed forms s -> (C, C', C'') for alpha = 0 and alpha = 1 (mpf s)."""
    if alpha == 0:
        def sol(s):
            r = 1 / s.context.cbrt(s)  # s^(-1/3)
            return r, -r**4 / 3, 4 * r**7 / 9
    elif alpha == 1:
        def sol(s):
            r = 1 / s.context.cbrt(s)
            return (r - r**2 / 3, -r**4 / 3 + 2 * r**5 / 9,
                    4 * r**7 / 9 - 10 * r**8 / 27)
    else:
        raise DomainError("algebraic solutions exist for alpha = 0 and alpha = 1 only")
    return sol


# ------------------------------------------------------------- solution


@dataclass(frozen=True)
class ResidualReport:
    max_sigma_residual: object
    max_identity_residual: object
    max_lesser_p3_residual: object
    max_okamoto_residual: object
    grid_range: tuple


@dataclass(frozen=True)
class OdeSolution:
    """Trajectory of the regular branch, with dense output by continuation.

    ``grid`` holds the accepted step ends; values between nodes are
    obtained by integrating from the nearest node to the left at the
    solution's tolerance.
    """

    alpha: object
    grid: tuple
    C: tuple
    Cp: tuple
    lnDelta: tuple
    Hcal: tuple
    K: tuple
    seed_order: int
    s0: object
    tol: float
    bits: int
    seed_series: object = field(default=None, repr=False, compare=False)
    delta_seed: object = field(default=None, repr=False, compare=False)

    @property
    def s_max(self):
        return self.grid[-1]

    def _ctx(self):
        return PrecisionCtx(self.bits)

    def state_at(self, s):
        """(C, C', ln Delta, K) at any s in (0, s_max]."""
        M = self._ctx().mp
        s = to_mpf(M, s)
        if not 0 < s <= self.s_max:
            raise DomainError(f"s = {s} lies outside the integrated range (0, {self.s_max}]")
        if s < self.s0:
            return self._seed_state(s)
        lo, hi = 0, len(self.grid) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.grid[mid] <= s:
                lo = mid
            else:
                hi = mid - 1
        y = [self.C[lo], self.Cp[lo], self.lnDelta[lo], self.K[lo]]
        if s == self.grid[lo]:
            return tuple(y)
        h0 = s - self.grid[lo]
        _, y, _ = integrate(_rhs(to_mpf(M, self.alpha)), self.grid[lo], y, s, M.mpf(self.tol), h0)
        return tuple(y)

    def _seed_state(self, s):
        ctx = self._ctx()
        c, cp = _eval_with_derivative(self.seed_series, s, ctx)
        L, _ = eval_series(self.delta_seed, s, ctx)
        H = hcal_from_c(s, c, cp, to_mpf(ctx.mp, self.alpha))
        return c, cp, L, H

    def delta(self, s):
        """ln Delta(s)."""
        return self.state_at(s)[2]

    def hcal(self, s):
        C, Cp, _, _ = self.state_at(s)
        M = self._ctx().mp
        return hcal_from_c(to_mpf(M, s), C, Cp, to_mpf(M, self.alpha))

    def header(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "tol": repr(self.tol),
            "s0": str(self.s0),
            "seed_order": self.seed_order,
            "bits": self.bits,
        }

    def to_csv(self, digits: int | None = None) -> str:
        import mpmath

        digits = digits or int(self.bits * 0.30103) + 2
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.header(), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "C", "Cp", "lnDelta", "Hcal"])
        for row in zip(self.grid, self.C, self.Cp, self.lnDelta, self.Hcal):
            w.writerow([mpmath.nstr(v, digits, strip_zeros=False) for v in row])
        return buf.getvalue()


def _eval_with_derivative(series, s, ctx):
    M = ctx.working(16)
    s = to_mpf(M, s)
    val = M.zero
    der = M.zero
    for e, c in series.terms:
        ef = M.mpf(e.numerator) / e.denominator
        c = M.mpf(c)
        val += c * s**ef
        if e != 0:
            der += c * ef * s ** (ef - 1)
    return ctx.round(val), ctx.round(der)


def _rhs(alpha):
    def f(s, y):
        C, Cp = y[0], y[1]
        H = hcal_from_c(s, C, Cp, alpha)
        return [Cp, c_second(s, C, Cp, alpha), H / s, -C / 2]

    return f


def solve_c(alpha, s_max, tol=DEFAULT_TOL, ctx: PrecisionCtx | None = None,
            s0=None) -> OdeSolution:
    """Integrate the regular branch of the C equation from s0 to s_max.

    The seed at s0 (default min(1/100, alpha^3/10)) sums the regular-branch
    series to ``ctx.tol``; ln Delta(s0) comes from the same series.  Steps
    are extrapolated midpoint steps with local error below ``tol``.
    """
    ctx = as_ctx(ctx)
    a = alpha_value(alpha)
    if a <= 0:
        raise DomainError(f"alpha must be positive, got {a}")
    if a.denominator == 1:
        raise SeriesError(
            f"alpha = {a} is an integer, where the series seed does not exist; "
            f"use a nearby non-integer alpha such as {a + Fraction(1, 10**6)}"
        )
    M = ctx.mp
    s0 = to_mpf(M, _seed_point(a) if s0 is None else s0)
    s_max = to_mpf(M, s_max)
    if not s_max > s0:
        raise DomainError(f"s_max = {s_max} must exceed the seed point {s0}")
    al = M.mpf(a.numerator) / a.denominator
    tol_m = M.mpf(tol)

    seed = c_regular_series(a, s0, ctx)
    dseed = delta_log_regular_series(seed, ctx)
    C0, Cp0 = _eval_with_derivative(seed, s0, ctx)
    L0, _ = eval_series(dseed, s0, ctx)
    K0 = hcal_from_c(s0, C0, Cp0, al)

    grid, Cs, Cps, Ls, Ks = [s0], [C0], [Cp0], [L0], [K0]

    def record(s, y):
        grid.append(s)
        Cs.append(y[0])
        Cps.append(y[1])
        Ls.append(y[2])
        Ks.append(y[3])

    def guard(s, y):
        if not y[0] > 0:
            raise SingularityError(f"C reached {M.nstr(y[0], 5)} at s = {M.nstr(s, 10)}",
                                   s=grid[-1])

    integrate(_rhs(al), s0, [C0, Cp0, L0, K0], s_max, tol_m, s0 / 10, guard=guard,
              min_step=M.ldexp(s_max, -ctx.bits // 3), on_step=record)
    H = tuple(hcal_from_c(s, c, cp, al) for s, c, cp in zip(grid, Cs, Cps))
    return OdeSolution(a, tuple(grid), tuple(Cs), tuple(Cps), tuple(Ls), H, tuple(Ks),
                       len(seed.terms), s0, float(tol), ctx.bits, seed, dseed)


# ------------------------------------------------------------- cached access

_cache_lock = threading.Lock()
_cache: dict = {}


def cached_solution(alpha, s, ctx: PrecisionCtx | None = None, tol=DEFAULT_TOL) -> OdeSolution:
    """A solution covering s, reused across calls with the same (alpha, bits, tol)."""
    ctx = as_ctx(ctx)
    a = alpha_value(alpha)
    key = (a, ctx.bits, float(tol))
    with _cache_lock:
        sol = _cache.get(key)
    if sol is None or sol.s_max < to_mpf(ctx.mp, s):
        sol = solve_c(a, max(to_mpf(ctx.mp, s), 50), tol, ctx)
        with _cache_lock:
            _cache[key] = sol
    return sol


def delta(s, alpha, ctx: PrecisionCtx | None = None, tol=DEFAULT_TOL):
    """ln Delta(s, alpha) on the regular branch."""
    ctx = as_ctx(ctx)
    return ctx.round(cached_solution(alpha, s, ctx, tol).delta(s))


def hcal(s, alpha, ctx: PrecisionCtx | None = None, tol=DEFAULT_TOL):
    """H(s) = s d/ds ln Delta(s, alpha)."""
    ctx = as_ctx(ctx)
    return ctx.round(cached_solution(alpha, s, ctx, tol).hcal(s))


# ---------------------------------------------------------------- checks


def verify_residuals(sol: OdeSolution, s_min=None, s_max=None) -> ResidualReport:
    """Worst relative residuals over the grid nodes in [s_min, s_max].

    The sigma form and the Okamoto form use H', H'' from differentiating the
    H identity through the C equation; the lesser P_III residual uses the
    chain rule for Y(x) = (x/2) C(x^2/8).  The identity residual compares
    H(C, C') with the independently integrated K.
    """
    M = PrecisionCtx(sol.bits).mp
    al = to_mpf(M, sol.alpha)
    lo = sol.grid[0] if s_min is None else to_mpf(M, s_min)
    hi = sol.grid[-1] if s_max is None else to_mpf(M, s_max)
    sig = ide = les = oka = M.zero
    used = []
    for s, C, Cp, K in zip(sol.grid, sol.C, sol.Cp, sol.K):
        if s < lo or s > hi:
            continue
        used.append(s)
        H, H1, H2 = hcal_derivatives(s, C, Cp, al)
        sig = max(sig, sigma_form_residual(s, H, H1, H2, al))
        oka = max(oka, okamoto_residual(s, H, H1, H2, al))
        les = max(les, lesser_p3_residual(s, C, Cp, al))
        ide = max(ide, abs(K - H) / max(1, abs(H)))
    if not used:
        raise DomainError("no grid nodes in the requested range")
    return ResidualReport(sig, ide, les, oka, (used[0], used[-1]))


def fit_constant_c1(alpha, s_grid: Sequence, ctx: PrecisionCtx | None = None,
                    tol=1e-30, sol: OdeSolution | None = None):
    """Estimate c1 from ln Delta(s) minus the non-constant large-s terms.

    The subtracted expansion runs through s^(-5/3); the first omitted term
    is O(s^-2).  Returns (mean, spread) of the pointwise estimates and
    raises :class:`FitQualityError` when the spread exceeds ten times the
    size of that omitted term at min(s_grid).
    """
    ctx = as_ctx(ctx)
    M = ctx.mp
    a = alpha_value(alpha)
    grid = [to_mpf(M, s) for s in s_grid]
    if not grid:
        raise DomainError("empty s grid")
    if min(grid) < 50:
        raise DomainError("the c1 fit needs s >= 50")
    if sol is None or sol.s_max < max(grid):
        sol = cached_solution(a, max(grid), ctx, tol)
    # H grid exponents 2/3 .. -5/3, i.e. ln Delta through s^(-5/3) plus the log term
    expansion = delta_log_large_series(a, 8)
    estimates = []
    tail = M.zero
    for s in grid:
        value, err = eval_series(expansion, s, ctx, constants={"c1": 0})
        estimates.append(sol.delta(s) - value)
        if s == min(grid):
            tail = err
    mean = M.fsum(estimates) / len(estimates)
    spread = max(estimates) - min(estimates)
    if spread > 10 * tail:
        raise FitQualityError(
            f"c1 estimates spread by {M.nstr(spread, 3)}, more than ten times the "
            f"O(s^-2) tail {M.nstr(tail, 3)}"
        )
    return ctx.round(mean), ctx.round(spread)
