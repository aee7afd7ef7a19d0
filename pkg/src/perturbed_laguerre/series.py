"""Truncated expansions of C, H, ln Delta and the cubic root at fixed alpha.

All coefficients are produced by substituting a truncated ansatz into the
governing equation, written with the Euler operator theta = s d/ds:

    C theta^2 C - (theta C)^2 - s C^3 - alpha C + 1 = 0,

    H = (theta C / C)^2 / 4 - s C / 2 - (1/C - alpha)^2 / 4,

and solving order by order.  For rational alpha every coefficient is an
exact :class:`fractions.Fraction`.

Besides the pure power series at s = 0, the regular solution of the C
equation carries a second family of exponents i + j*alpha.  It is a
one-parameter family C = 1/alpha + k s^alpha + ... + (power series), and
only one value of k belongs to the double-scaling limit.  That branch is
available through :func:`c_regular_series` with coefficients at extended
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import DomainError, SeriesError
from .precision import PrecisionCtx, as_ctx, to_mpf
from .special_functions import log_gamma

ZERO = "zero"
INFINITY = "infinity"

DEFAULT_TERMS = 20


# ----------------------------------------------------------------- alpha


def alpha_value(alpha) -> Fraction:
    """Exact rational alpha; floats are read through their shortest repr.

    So 0.3 becomes 3/10 rather than the nearest binary fraction.
    """
    if isinstance(alpha, Fraction):
        a = alpha
    elif isinstance(alpha, int):
        a = Fraction(alpha)
    elif isinstance(alpha, float):
        if not math.isfinite(alpha):
            raise DomainError(f"alpha must be finite, got {alpha}")
        a = Fraction(repr(alpha))
    elif isinstance(alpha, str):
        a = Fraction(alpha)
    else:
        # mpf and friends: exact binary value
        try:
            m, e = alpha.man_exp
        except AttributeError as exc:
            raise DomainError(f"cannot interpret {alpha!r} as a rational alpha") from exc
        a = Fraction(int(m)) * (Fraction(2) ** int(e))
    return a


AlphaValue = Fraction


def _is_integer(a: Fraction) -> bool:
    return a.denominator == 1


# ----------------------------------------------------- truncated algebra


class _Trunc:
    """sum c_e x^e over exponents e < order (exact up to ``order``)."""

    __slots__ = ("c", "order")

    def __init__(self, coeffs: Mapping, order):
        self.c = {Fraction(e): v for e, v in coeffs.items() if Fraction(e) < order}
        self.order = Fraction(order)

    def valuation(self):
        nz = [e for e, v in self.c.items() if v != 0]
        return min(nz) if nz else self.order

    def __add__(self, other):
        if not isinstance(other, _Trunc):
            other = _Trunc({0: other}, self.order)
        out = dict(self.c)
        for e, v in other.c.items():
            out[e] = out.get(e, 0) + v
        return _Trunc(out, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return _Trunc({e: -v for e, v in self.c.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, _Trunc):
            return _Trunc({e: v * other for e, v in self.c.items()}, self.order)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        out = {}
        for e1, v1 in self.c.items():
            if v1 == 0:
                continue
            for e2, v2 in other.c.items():
                e = e1 + e2
                if e < order and v2 != 0:
                    out[e] = out.get(e, 0) + v1 * v2
        return _Trunc(out, order)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by x^k."""
        k = Fraction(k)
        return _Trunc({e + k: v for e, v in self.c.items()}, self.order + k)

    def theta(self):
        return _Trunc({e: e * v for e, v in self.c.items()}, self.order)

    def inverse(self):
        v = self.valuation()
        if v >= self.order:
            raise SeriesError("cannot invert a series with no known nonzero term")
        # S = x^v (s_0 + sum_{e>0} s_e x^e); solve S q = x^0 term by term
        order = self.order - 2 * v
        lead = self.c[v]
        rest = [(e - v, c) for e, c in self.c.items() if e > v and c != 0]
        exps = _closure([e for e, _ in rest], order - 0)
        q = {}
        for e in exps:
            if e == 0:
                q[e] = 1 / lead
                continue
            acc = 0
            for e1, c1 in rest:
                x = e - e1
                if x < 0:
                    continue
                if x in q:
                    acc += c1 * q[x]
            q[e] = -acc / lead
        return _Trunc(q, order).shift(-v)

    def coeff(self, e):
        return self.c.get(Fraction(e), 0)


def _closure(gens, bound):
    """Sorted set of finite sums of ``gens`` (all > 0), including 0, below ``bound``."""
    out = {Fraction(0)}
    frontier = [Fraction(0)]
    gens = sorted(set(gens))
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y >= bound:
                    break
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(out)


# ----------------------------------------------------------- public type


@dataclass(frozen=True)
class PuiseuxSeries:
    """A truncated expansion in powers of s.

    ``terms`` is a tuple of (exponent, coefficient) pairs, ordered from the
    dominant term: ascending exponents at ``origin="zero"``, descending at
    ``origin="infinity"``.  ``order`` is the truncation bound: every term
    of the full expansion that is not listed has exponent >= order (at
    zero) or <= order (at infinity).  ``log_coeff`` multiplies ln s and
    ``const_slot`` names an undetermined additive constant.  ``tail`` is
    the first omitted nonzero term, used as the truncation-error estimate.
    """

    origin: str
    alpha: Fraction | None
    terms: tuple
    order: Fraction
    log_coeff: object = None
    const_slot: str | None = None
    tail: tuple | None = None

    def __post_init__(self):
        if self.origin not in (ZERO, INFINITY):
            raise DomainError(f"origin must be 'zero' or 'infinity', got {self.origin!r}")
        exps = [e for e, _ in self.terms]
        step = 1 if self.origin == ZERO else -1
        if any((b - a) * step <= 0 for a, b in zip(exps, exps[1:])):
            raise SeriesError("series exponents must be strictly ordered")
        if self.origin == ZERO and exps and exps[0] < 0:
            raise SeriesError("negative exponent in a series at the origin")
        if self.log_coeff is not None and self.origin != INFINITY:
            raise SeriesError("a log term only occurs in large-s expansions")

    def coeff(self, exponent) -> object:
        e = Fraction(exponent)
        for x, c in self.terms:
            if x == e:
                return c
        if (self.origin == ZERO and e >= self.order) or (self.origin == INFINITY and e <= self.order):
            raise SeriesError(f"exponent {e} lies beyond the truncation order {self.order}")
        return 0

    def exponents(self):
        return [e for e, _ in self.terms]

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for _, c in self.terms)

    def __sub__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        if self.origin != other.origin:
            raise SeriesError("cannot combine series at different origins")
        coeffs = {}
        for e, c in self.terms:
            coeffs[e] = coeffs.get(e, 0) + c
        for e, c in other.terms:
            coeffs[e] = coeffs.get(e, 0) - c
        if self.origin == ZERO:
            order = min(self.order, other.order)
            keep = sorted(e for e in coeffs if e < order)
        else:
            order = max(self.order, other.order)
            keep = sorted((e for e in coeffs if e > order), reverse=True)
        logc = None
        if self.log_coeff is not None or other.log_coeff is not None:
            logc = (self.log_coeff or 0) - (other.log_coeff or 0)
        return PuiseuxSeries(self.origin, None, tuple((e, coeffs[e]) for e in keep), order,
                             logc, None, None)

    # serialization -----------------------------------------------------

    def to_json(self) -> dict:
        def num(c):
            if isinstance(c, (int, Fraction)):
                c = Fraction(c)
                return {"coeff_num": str(c.numerator), "coeff_den": str(c.denominator)}
            return {"coeff": _decimal(c)}

        doc = {
            "origin": self.origin,
            "alpha": None if self.alpha is None else str(self.alpha),
            "terms": [{"exponent_num": e.numerator, "exponent_den": e.denominator, **num(c)}
                      for e, c in self.terms],
            "log_coeff": None if self.log_coeff is None else _frac_or_decimal(self.log_coeff),
            "const_slot": self.const_slot,
            "order": str(self.order),
        }
        if self.tail is not None:
            e, c = self.tail
            doc["tail"] = {"exponent_num": e.numerator, "exponent_den": e.denominator, **num(c)}
        return doc

    @classmethod
    def from_json(cls, doc: dict, ctx: PrecisionCtx | None = None) -> "PuiseuxSeries":
        ctx = as_ctx(ctx)

        def coeff(t):
            if "coeff_num" in t:
                return Fraction(int(t["coeff_num"]), int(t["coeff_den"]))
            return ctx.mp.mpf(t["coeff"])

        def term(t):
            return (Fraction(int(t["exponent_num"]), int(t["exponent_den"])), coeff(t))

        logc = doc.get("log_coeff")
        if logc is not None:
            logc = Fraction(logc) if "/" in logc or logc.lstrip("-").isdigit() else ctx.mp.mpf(logc)
        alpha = doc.get("alpha")
        return cls(
            origin=doc["origin"],
            alpha=None if alpha is None else Fraction(alpha),
            terms=tuple(term(t) for t in doc["terms"]),
            order=Fraction(doc["order"]),
            log_coeff=logc,
            const_slot=doc.get("const_slot"),
            tail=term(doc["tail"]) if doc.get("tail") else None,
        )


def _decimal(x) -> str:
    import mpmath

    return mpmath.nstr(x, int(x.context.prec * 0.30103) + 2, strip_zeros=False) \
        if hasattr(x, "context") else str(x)


def _frac_or_decimal(x) -> str:
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return _decimal(x)


def _from_trunc(tr: _Trunc, origin, alpha, m: int, to_s=lambda e: e, **extra) -> PuiseuxSeries:
    """Keep the first ``m`` grid exponents of a truncated series; record the tail."""
    pairs = sorted(((to_s(e), v) for e, v in tr.c.items()),
                   key=lambda p: p[0], reverse=(origin == INFINITY))
    if len(pairs) < m:
        raise SeriesError(f"only {len(pairs)} terms are determined, {m} requested")
    kept = tuple(pairs[:m])
    tail = next(((e, v) for e, v in pairs[m:] if v != 0), None)
    order = pairs[m][0] if len(pairs) > m else to_s(tr.order)
    return PuiseuxSeries(origin, alpha, kept, order, tail=tail, **extra)


# ------------------------------------------------------------ C at zero


def _check_small_alpha(a: Fraction):
    if a <= 0:
        raise DomainError(f"alpha must be positive, got {a}")
    if _is_integer(a):
        raise DomainError(
            f"alpha = {a} is an integer: the denominator (alpha^2 - {a**2}) of the small-s "
            "coefficients vanishes"
        )


def _c_small_coeffs(a: Fraction, m: int) -> list:
    """a_0 .. a_{m-1} of the power-series solution."""
    c = [1 / a]
    c2 = [c[0] ** 2]
    for n in range(1, m):
        # coefficient of s^n: (n^2 a_0 - alpha) a_n = -sum(...) + [C^3]_{n-1}
        r = sum((j * j - j * (n - j)) * c[j] * c[n - j] for j in range(1, n))
        r -= sum(c[i] * c2[n - 1 - i] for i in range(n))
        c.append(-r / (n * n * c[0] - a))
        c2.append(sum(c[i] * c[n - i] for i in range(n + 1)))
    return c


def _c_small_trunc(a: Fraction, m: int) -> _Trunc:
    return _Trunc(dict(enumerate(_c_small_coeffs(a, m))), m)


def c_small_series(alpha, m: int = DEFAULT_TERMS) -> PuiseuxSeries:
    """Power series a_0 + a_1 s + ... + a_{m-1} s^{m-1} solving the C equation."""
    a = alpha_value(alpha)
    _check_small_alpha(a)
    if m < 2:
        raise DomainError("need at least two terms")
    return _from_trunc(_c_small_trunc(a, m + 4), ZERO, a, m)


# -------------------------------------------------------- C at infinity
# In u = s^(-1/3) the equation times u^3 reads
#   (u^3/9)(C theta_u^2 C - (theta_u C)^2) - C^3 - alpha u^3 C + u^3 = 0.


def _cube_coeff(b: dict, N: int, skip=None) -> Fraction:
    """[C^3]_N for C = sum b_k u^k (k >= 1), omitting every product that uses index ``skip``."""
    total = 0
    for i in range(1, N - 1):
        if i not in b or i == skip:
            continue
        for j in range(1, N - i):
            k = N - i - j
            if j not in b or k not in b or j == skip or k == skip:
                continue
            total += b[i] * b[j] * b[k]
    return total


def _c_large_coeffs(a: Fraction, m: int) -> dict:
    """b_1 .. b_m in C = sum b_k u^k."""
    b = {1: Fraction(1)}
    for k in range(2, m + 1):
        N = k + 2
        deriv = sum(b[i] * b[N - 3 - i] * ((N - 3 - i) ** 2 - i * (N - 3 - i))
                    for i in range(1, N - 3) if (N - 3 - i) in b)
        rest = Fraction(deriv, 9) - _cube_coeff(b, N, skip=k) - a * b[k - 1]
        # the unknown enters [C^3]_N as 3 b_1^2 b_k
        b[k] = rest / (3 * b[1] ** 2)
    return b


def _u_to_s(e: Fraction) -> Fraction:
    return -Fraction(e) / 3


def c_large_series(alpha, m: int = DEFAULT_TERMS) -> PuiseuxSeries:
    """Asymptotic series sum_{k=1}^m b_k s^{-k/3} with b_1 = 1 (the real cube root)."""
    a = alpha_value(alpha)
    if a < 0:
        raise DomainError(f"alpha must be non-negative, got {a}")
    if m < 2:
        raise DomainError("need at least two terms")
    b = _c_large_coeffs(a, m + 4)
    tr = _Trunc(b, m + 5)
    return _from_trunc(tr, INFINITY, a, m, to_s=_u_to_s)


# ------------------------------------------------------------- H and ln Delta


def _h_from_c_small(C: _Trunc, a) -> _Trunc:
    Ci = C.inverse()
    q = C.theta() * Ci
    return q * q * Fraction(1, 4) - C.shift(1) * Fraction(1, 2) - (Ci - a) * (Ci - a) * Fraction(1, 4)


def _h_from_c_large(C: _Trunc, a) -> _Trunc:
    """H in powers of u = s^(-1/3); theta_s = -theta_u / 3 and s = u^-3."""
    Ci = C.inverse()
    q = C.theta() * Ci * Fraction(-1, 3)
    return q * q * Fraction(1, 4) - C.shift(-3) * Fraction(1, 2) - (Ci - a) * (Ci - a) * Fraction(1, 4)


def h_small_series(alpha, m: int = DEFAULT_TERMS) -> PuiseuxSeries:
    """d_1 s + ... + d_m s^m, composed from the C series through the H identity."""
    a = alpha_value(alpha)
    _check_small_alpha(a)
    H = _h_from_c_small(_c_small_trunc(a, m + 3), a)
    H.c.pop(Fraction(0), None)  # H(0) = 0 identically
    return _from_trunc(H, ZERO, a, m)


def h_large_series(alpha, m: int = DEFAULT_TERMS) -> PuiseuxSeries:
    """eta_0 s^{2/3} + eta_1 s^{1/3} + ... (m grid exponents from 2/3 downwards)."""
    a = alpha_value(alpha)
    if a < 0:
        raise DomainError(f"alpha must be non-negative, got {a}")
    C = _Trunc(_c_large_coeffs(a, m + 6), m + 7)
    H = _h_from_c_large(C, a)
    return _from_trunc(H, INFINITY, a, m, to_s=_u_to_s)


def _integrate_over_s(series: PuiseuxSeries, const_slot=None) -> PuiseuxSeries:
    """Term-wise antiderivative of series/s; s^0 becomes a log term."""
    terms = []
    logc = None
    for e, c in series.terms:
        if e == 0:
            logc = c
        else:
            terms.append((e, c / e))
    tail = None
    if series.tail is not None:
        e, c = series.tail
        tail = (e, c / e) if e != 0 else None
    if series.origin == ZERO:
        return PuiseuxSeries(ZERO, series.alpha, tuple(terms), series.order, tail=tail)
    return PuiseuxSeries(INFINITY, series.alpha, tuple(terms), series.order,
                         logc if logc is not None else Fraction(0), const_slot, tail)


def delta_log_small_series(alpha, m: int = DEFAULT_TERMS) -> PuiseuxSeries:
    """ln Delta near s = 0 as the power series with zero constant term."""
    return _integrate_over_s(h_small_series(alpha, m))


def delta_log_large_series(alpha, m: int = DEFAULT_TERMS) -> PuiseuxSeries:
    """ln Delta at infinity: c1 + (log_coeff) ln s + sum of s^{k/3} terms.

    ``m`` counts grid exponents of H, the s^0 one included, so the result
    has ``m - 1`` power terms plus the log term.
    """
    return _integrate_over_s(h_large_series(alpha, m), const_slot="c1")


def ratio_expansion(alpha, m: int = DEFAULT_TERMS) -> PuiseuxSeries:
    """ln Delta(s, alpha+1) - ln Delta(s, alpha); the constant slot is c2."""
    a = alpha_value(alpha)
    diff = delta_log_large_series(a + 1, m + 1) - delta_log_large_series(a, m + 1)
    terms = diff.terms[:-1]
    tail = diff.terms[-1] if diff.terms[-1][1] != 0 else None
    return PuiseuxSeries(INFINITY, a, terms, diff.terms[-1][0], diff.log_coeff, "c2", tail)


# -------------------------------------------------------------- cubic root


def ctilde_series(alpha, m: int = DEFAULT_TERMS, origin: str = ZERO) -> PuiseuxSeries:
    """Series of the real root of s C^3 + alpha C - 1 = 0."""
    a = alpha_value(alpha)
    if origin == ZERO:
        if a <= 0:
            raise DomainError(f"the small-s cubic root needs alpha > 0, got {a}")
        c = [1 / a]
        c2 = [c[0] ** 2]
        for n in range(1, m + 4):
            c3 = sum(c[i] * c2[n - 1 - i] for i in range(n))
            c.append(-c3 / a)
            c2.append(sum(c[i] * c[n - i] for i in range(n + 1)))
        return _from_trunc(_Trunc(dict(enumerate(c)), m + 4), ZERO, a, m)
    if origin == INFINITY:
        if a < 0:
            raise DomainError(f"alpha must be non-negative, got {a}")
        # C^3 + alpha u^3 C - u^3 = 0 in u = s^(-1/3)
        b = {1: Fraction(1)}
        for k in range(2, m + 5):
            N = k + 2
            rest = -_cube_coeff(b, N, skip=k) - a * b.get(k - 1, 0)
            b[k] = rest / 3
        return _from_trunc(_Trunc(b, m + 5), INFINITY, a, m, to_s=_u_to_s)
    raise DomainError(f"origin must be 'zero' or 'infinity', got {origin!r}")


# --------------------------------------------------------- regular branch


def branch_constant(alpha, ctx: PrecisionCtx | None = None):
    """Coefficient k of s^alpha in the regular solution C(s) selected by the limit.

    k = -2 (alpha+1)^2 kappa with
    kappa = 2^(-alpha-1) pi / (sin(pi alpha) Gamma(alpha+1) Gamma(alpha+2)^2),
    the coefficient of s^(alpha+1) in ln Delta.  It comes from the small-x
    behaviour of the hard-edge density; integer alpha is excluded (the
    expansion then needs logarithms).
    """
    ctx = as_ctx(ctx)
    a = alpha_value(alpha)
    _check_small_alpha(a)
    M = ctx.working(32)
    al = M.mpf(a.numerator) / a.denominator
    inner = PrecisionCtx(M.prec)
    lg = M.mpf(log_gamma(al + 1, inner)) + 2 * M.mpf(log_gamma(al + 2, inner))
    kappa = M.pi * M.power(2, -al - 1) / (M.sinpi(al) * M.exp(lg))
    return ctx.round(-2 * (al + 1) ** 2 * kappa)


def _lattice(a: Fraction, emax: Fraction):
    out = set()
    jmax = int(emax / a) + 1
    for i in range(int(emax) + 1):
        for j in range(jmax + 1):
            e = i + j * a
            if e < emax:
                out.add(e)
    return sorted(out)


_LATTICE_LIMIT = 4000


def _regular_coeffs(a: Fraction, k, emax: Fraction, M) -> dict:
    """Coefficients of the regular solution on {i + j alpha} below emax."""
    exps = _lattice(a, emax)
    if len(exps) > _LATTICE_LIMIT:
        raise SeriesError(
            f"the regular-branch lattice below {emax} has {len(exps)} exponents; "
            "alpha is too small for this seed"
        )
    al = M.mpf(a.numerator) / a.denominator
    c = {Fraction(0): 1 / al}
    sq = {}

    def square(x):
        if x not in sq:
            sq[x] = M.fsum(c[e1] * c[x - e1] for e1 in list(c) if (x - e1) in c)
        return sq[x]

    for e in exps[1:]:
        if e == a:
            c[e] = M.mpf(k)
            continue
        acc = M.zero
        for e1 in list(c):
            if e1 == 0:
                continue
            e2 = e - e1
            if e2 > 0 and e2 in c:
                acc += c[e1] * c[e2] * (e2 * e2 - e1 * e2)
        t = e - 1
        if t >= 0:
            for e1 in list(c):
                if e1 <= t:
                    acc -= c[e1] * square(t - e1)
        ef = M.mpf(e.numerator) / e.denominator
        c[e] = -acc * al / (ef * ef - al * al)
    return c


def c_regular_series(alpha, s0, ctx: PrecisionCtx | None = None, tol=None) -> PuiseuxSeries:
    """The regular solution of the C equation near s = 0, to be summed at s <= s0.

    The exponent lattice is extended until the terms of the last unit band
    sum to less than tol/10 at s0.
    """
    ctx = as_ctx(ctx)
    a = alpha_value(alpha)
    _check_small_alpha(a)
    M = ctx.working(32)
    s0 = to_mpf(M, s0)
    tol = ctx.tol if tol is None else to_mpf(M, tol)
    k = branch_constant(a, PrecisionCtx(M.prec))
    emax = max(Fraction(8), 2 * a + 2)
    while True:
        c = _regular_coeffs(a, k, emax, M)
        band = M.fsum(abs(v) * s0 ** (M.mpf(e.numerator) / e.denominator)
                      for e, v in c.items() if e >= emax - 1)
        if band < tol / 10:
            break
        emax *= 2
        if emax > 512:
            raise SeriesError(f"regular-branch series does not converge at s0 = {s0}")
    r = ctx.round
    terms = tuple((e, r(v)) for e, v in sorted(c.items()))
    return PuiseuxSeries(ZERO, a, terms, emax)


def h_regular_series(c_series: PuiseuxSeries, ctx: PrecisionCtx | None = None) -> PuiseuxSeries:
    """H from a regular-branch C series through the H identity."""
    ctx = as_ctx(ctx)
    a = c_series.alpha
    al = ctx.mp.mpf(a.numerator) / a.denominator
    C = _Trunc(dict(c_series.terms), c_series.order)
    H = _h_from_c_small(C, al)
    H.c.pop(Fraction(0), None)
    terms = tuple(sorted(H.c.items()))
    return PuiseuxSeries(ZERO, a, terms, H.order)


def delta_log_regular_series(c_series: PuiseuxSeries, ctx: PrecisionCtx | None = None) -> PuiseuxSeries:
    return _integrate_over_s(h_regular_series(c_series, ctx))


# --------------------------------------------------------------- evaluation


def eval_series(series: PuiseuxSeries, s, ctx: PrecisionCtx | None = None,
                constants: Mapping | None = None, tol=None):
    """Numeric value of a series at s > 0 and a truncation-error estimate.

    The estimate is the size of the first omitted nonzero term (zero when
    none is known).  A constant slot must be resolved through
    ``constants``.  At infinity s >= 1 is required, and when ``tol`` is
    given the evaluation is refused if the estimate exceeds it.
    """
    ctx = as_ctx(ctx)
    M = ctx.working(16)
    s = to_mpf(M, s)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if series.origin == INFINITY and s < 1:
        raise SeriesError(f"large-s series evaluated at s = {s} < 1")
    if series.const_slot is not None:
        if not constants or series.const_slot not in constants:
            raise SeriesError(f"constant {series.const_slot!r} must be supplied to evaluate")

    def num(c):
        return to_mpf(M, c)

    def power(e):
        return s ** (M.mpf(e.numerator) / e.denominator)

    value = M.fsum(num(c) * power(e) for e, c in series.terms)
    if series.log_coeff is not None:
        value += num(series.log_coeff) * M.log(s)
    if series.const_slot is not None:
        value += to_mpf(M, constants[series.const_slot])
    err = M.zero
    if series.tail is not None:
        e, c = series.tail
        err = abs(num(c) * power(e))
    if tol is not None and series.origin == INFINITY and err > tol:
        raise SeriesError(
            f"asymptotic series cannot reach {tol} at s = {s} (first omitted term {M.nstr(err, 3)})"
        )
    return ctx.round(value), ctx.round(err)


def substitution_residual_c(series: PuiseuxSeries) -> _Trunc:
    """Left side of the C equation with the truncated series substituted.

    Returned as a truncated series whose retained coefficients vanish for a
    correct solution.
    """
    a = series.alpha
    if series.origin == ZERO:
        C = _Trunc(dict(series.terms), series.order)
        return C * C.theta().theta() - C.theta() * C.theta() - C * C * C.shift(1) - C * a + 1
    # back to u = s^(-1/3): exponent -3e
    C = _Trunc({-3 * e: c for e, c in series.terms}, -3 * series.order)
    tu = C.theta()
    lhs = (C * tu.theta() - tu * tu).shift(3) * Fraction(1, 9) - C * C * C - C.shift(3) * a
    return lhs + _Trunc({3: Fraction(1)}, lhs.order)


def sigma_residual_h(series: PuiseuxSeries) -> _Trunc:
    """Left side of the sigma form with a small-s H series substituted.

    (s H'')^2 + 4 H'^2 (s H' - H) - (alpha H' + 1/2)^2, using
    s H' = theta H and s^2 H'' = theta^2 H - theta H.  The whole equation is
    multiplied by s^2 so that only theta operators appear.
    """
    a = series.alpha
    H = _Trunc(dict(series.terms), series.order)
    tH = H.theta()
    s2H2 = tH.theta() - tH  # s^2 H''
    # s^2 [(s H'')^2 + 4 H'^2 (s H' - H) - (alpha H' + 1/2)^2]
    #   = (s^2 H'')^2 + 4 (tH)^2 (tH - H) - (alpha tH + s/2)^2
    half_s = _Trunc({1: Fraction(1, 2)}, H.order + 1)
    return s2H2 * s2H2 + tH * tH * (tH - H) * 4 - (tH * a + half_s) * (tH * a + half_s)
