"""Extended-precision log-Gamma, zeta at integers, Barnes G and Bessel K.

All routines take a :class:`~perturbed_laguerre.precision.PrecisionCtx`,
work internally with a few guard bits, and return an ``mpf`` rounded to
``ctx.bits``.  mpmath supplies the number type and the constants pi and
Euler's gamma; the function values are computed here.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, PrecisionError
from .precision import PrecisionCtx, as_ctx, mp_context, to_mpf

_GUARD = 24


@lru_cache(maxsize=None)
def _bernoulli_table(count: int) -> tuple[Fraction, ...]:
    """B_0 .. B_count as exact fractions (B_1 = -1/2 convention)."""
    b = [Fraction(1)]
    for m in range(1, count + 1):
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * b[k]
            binom = binom * (m + 1 - k) // (k + 1)
        b.append(-acc / (m + 1))
    return tuple(b)


def _bernoulli(n: int) -> Fraction:
    # round the table size up so repeated calls reuse one cached table
    return _bernoulli_table(max(64, -(-n // 64) * 64))[n]


def _log_gamma_at(x, M):
    """ln Gamma(x) for x > 0 at the precision of context ``M``."""
    wp = M.prec
    zmin = max(20, wp // 2)
    shift = max(0, math.ceil(zmin - float(x)))
    z = x + shift
    prod = M.mpf(1)
    for k in range(shift):
        prod *= x + k
    eps = M.ldexp(1, -wp)
    acc = (z - M.mpf(0.5)) * M.log(z) - z + M.log(2 * M.pi) / 2
    zinv2 = 1 / (z * z)
    zpow = 1 / z
    k = 1
    while True:
        b = _bernoulli(2 * k)
        term = M.mpf(b.numerator) / (b.denominator * (2 * k) * (2 * k - 1)) * zpow
        acc += term
        if abs(term) < eps * max(1, abs(acc)):
            break
        zpow *= zinv2
        k += 1
    return acc - M.log(prod)


def log_gamma(x, ctx: PrecisionCtx | None = None):
    """ln Gamma(x) for real x > 0.

    Stirling's series after shifting the argument past ``bits/2`` so that
    the Bernoulli terms fall below 2**-bits within a few dozen terms.
    """
    ctx = as_ctx(ctx)
    M = ctx.working(_GUARD)
    x = to_mpf(M, x)
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    if x == 1 or x == 2:
        return ctx.mp.zero
    return ctx.round(_log_gamma_at(x, M))


def _zeta_borwein(k: int, M):
    wp = M.prec
    n = math.ceil(wp * math.log(2) / math.log(3 + math.sqrt(8))) + 4
    # d_j = n * sum_{i<=j} (n+i-1)! 4^i / ((n-i)! (2i)!), all integers
    d = []
    acc = 0
    term = Fraction(1, n)  # i = 0 term: (n-1)!/(n!) = 1/n
    for i in range(n + 1):
        if i > 0:
            term = term * (n + i - 1) * (n - i + 1) * 4 / ((2 * i) * (2 * i - 1))
        acc += term
        d.append(n * acc)
    dn = d[n]
    total = M.zero
    for j in range(n):
        c = d[j] - dn
        total += (-1) ** j * (M.mpf(c.numerator) / c.denominator) / M.mpf(j + 1) ** k
    return -total / ((M.mpf(dn.numerator) / dn.denominator) * (1 - M.ldexp(1, 1 - k)))


def _zeta_direct(k: int, M, jmax: int):
    total = M.zero
    for j in range(jmax, 0, -1):
        total += M.mpf(j) ** (-k)
    # tail sum_{j>jmax} j^-k < jmax^(1-k)/(k-1) is below 2^-wp by choice of jmax
    return total


@lru_cache(maxsize=4096)
def _zeta_cached(k: int, wp: int):
    M = mp_context(wp)
    jmax = math.ceil(2 ** (wp / (k - 1))) if wp / (k - 1) < 9 else None
    if jmax is not None and jmax <= 400:
        return _zeta_direct(k, M, jmax + 1)
    return _zeta_borwein(k, M)


def zeta_int(k: int, ctx: PrecisionCtx | None = None):
    """Riemann zeta at an integer k >= 2.

    Borwein's alternating-series acceleration for small k; plain summation
    once 2**(bits/(k-1)) is small enough for the tail to be negligible.
    """
    ctx = as_ctx(ctx)
    if int(k) != k or k < 2:
        raise DomainError(f"zeta_int requires an integer k >= 2, got {k!r}")
    return ctx.round(_zeta_cached(int(k), ctx.bits + _GUARD))


def _log_barnes_seed(w, M):
    """ln G(1+w) from its Taylor series, |w| < 1."""
    wp = M.prec
    eps = M.ldexp(1, -wp)
    acc = w / 2 * M.log(2 * M.pi) - (w + (1 + M.euler) * w * w) / 2
    wpow = w * w
    k = 2
    while True:
        wpow *= w
        term = (-1) ** k * _zeta_cached(k, wp) * wpow / (k + 1)
        acc += term
        if abs(term) < eps * max(1, abs(acc)) and k > 3:
            break
        k += 1
    return acc


def barnes_g_log(z, ctx: PrecisionCtx | None = None):
    """ln G(z) for real z > 0, G the Barnes G-function.

    The argument is reduced to z0 = z - m in [1/2, 3/2), where the Taylor
    seed of ln G(1+w) converges at least like 2**-k, and the functional
    relation G(z+1) = Gamma(z) G(z) is telescoped back to z.
    """
    ctx = as_ctx(ctx)
    M = ctx.working(_GUARD + 16)
    z = to_mpf(M, z)
    if not z > 0:
        raise DomainError(f"barnes_g_log requires z > 0, got {z}")
    if z == int(z) and z <= 3:
        return ctx.mp.zero
    m = int(M.floor(z - M.mpf(0.5)))
    z0 = z - m
    value = _log_barnes_seed(z0 - 1, M)
    if m > 0:
        # sum_{k<m} ln Gamma(z0+k) = m ln Gamma(z0) + sum_{j<=m-2} (m-1-j) ln(z0+j)
        value += m * _log_gamma_at(z0, M)
        for j in range(m - 1):
            value += (m - 1 - j) * M.log(z0 + j)
    elif m < 0:
        # only 0 < z < 1/2 lands here, with m = -1
        value -= _log_gamma_at(z, M)
    return ctx.round(value)


def _besselk_asymptotic(nu, x, M):
    """Large-argument expansion; ``None`` when it cannot reach 2**-prec."""
    eps = M.ldexp(1, -M.prec)
    mu = 4 * nu * nu
    term = M.one
    acc = M.one
    k = 1
    while True:
        new = term * (mu - (2 * k - 1) ** 2) / (8 * k * x)
        if new == 0:
            break
        if abs(new) > abs(term):
            return None
        term = new
        acc += term
        # the first omitted term bounds the error once k > nu - 1/2
        if abs(term) < eps * abs(acc) and k > nu:
            break
        k += 1
    return M.sqrt(M.pi / (2 * x)) * M.exp(-x) * acc


def _besselk_series_integer(n: int, x, M):
    """DLMF 10.31.1; returns (value, magnitude of the largest contribution)."""
    eps = M.ldexp(1, -M.prec)
    half = x / 2
    q = half * half
    first = M.zero
    if n > 0:
        term = M.mpf(math.factorial(n - 1))
        for k in range(n):
            if k > 0:
                term = term * (-q) / (k * (n - k))
            first += term
        first = first * half ** (-n) / 2
    # I_n(x) and the digamma sum share the factor (x/2)^n q^k / (k!(n+k)!)
    base = half**n / M.factorial(n)
    psi_k = -M.euler
    psi_nk = -M.euler + sum(M.mpf(1) / j for j in range(1, n + 1))
    i_sum = M.zero
    psi_sum = M.zero
    k = 0
    while True:
        i_sum += base
        contrib = (psi_k + psi_nk) * base
        psi_sum += contrib
        if k > 2 and base < eps * i_sum and abs(contrib) < eps * abs(psi_sum):
            break
        k += 1
        base = base * q / (k * (n + k))
        psi_k += M.mpf(1) / k
        psi_nk += M.mpf(1) / (n + k)
    sign = -1 if n % 2 == 0 else 1
    log_part = sign * M.log(half) * i_sum
    psi_part = -sign * psi_sum / 2
    value = first + log_part + psi_part
    scale = max(abs(first), abs(log_part), abs(psi_part))
    return value, scale


def _besselk_series_fractional(nu, x, M):
    """K_nu = Gamma(nu)(x/2)^-nu/2 * sum c_k - pi/(2 sin(pi nu)) I_nu, nu not integer."""
    eps = M.ldexp(1, -M.prec)
    half = x / 2
    q = half * half
    c = M.one
    s1 = M.one
    peak = M.one
    k = 1
    while True:
        c = c * q / (k * (k - nu))
        s1 += c
        peak = max(peak, abs(c))
        if k > nu + 1 and abs(c) < eps * abs(s1):
            break
        k += 1
    pref = M.exp(_log_gamma_at(nu, M)) * half ** (-nu) / 2
    a_part = pref * s1
    term = half**nu / M.exp(_log_gamma_at(nu + 1, M))
    i_nu = M.zero
    k = 0
    while True:
        i_nu += term
        if term < eps * i_nu:
            break
        k += 1
        term = term * q / (k * (nu + k))
    b_part = M.pi / (2 * M.sin(M.pi * nu)) * i_nu
    value = a_part - b_part
    scale = max(abs(pref) * peak, abs(b_part))
    return value, scale


def bessel_k(nu, x, ctx: PrecisionCtx | None = None):
    """Modified Bessel function of the second kind K_nu(x), real nu, x > 0.

    For x >= max(10, bits/3) the large-argument expansion is used when its
    smallest term reaches the working precision.  Otherwise the ascending
    series is summed with enough guard bits to absorb the cancellation
    between its two parts; exactly integral orders use the digamma form.
    K is even in nu, so only |nu| is ever evaluated.
    """
    ctx = as_ctx(ctx)
    ctx.check_reachable()
    M0 = ctx.working(_GUARD)
    x = to_mpf(M0, x)
    nu = abs(to_mpf(M0, nu))
    if not x > 0:
        raise DomainError(f"bessel_k requires x > 0, got {x}")
    if x >= max(10, ctx.bits / 3):
        val = _besselk_asymptotic(nu, x, M0)
        if val is not None:
            return ctx.round(val)

    n_near = int(M0.nint(nu))
    frac = abs(nu - n_near)
    guard = _GUARD + 16 + math.ceil(2 * float(x) / math.log(2)) + math.ceil(math.log2(float(nu) + 2))
    if frac != 0:
        guard += max(0, math.ceil(-math.log2(float(frac))))
    for _ in range(3):
        M = ctx.working(guard)
        if frac == 0:
            value, scale = _besselk_series_integer(n_near, M.mpf(x), M)
        else:
            value, scale = _besselk_series_fractional(M.mpf(nu), M.mpf(x), M)
        if value > 0:
            lost = float(M.log(scale / value, 2))
            if lost < guard - _GUARD:
                return ctx.round(value)
            guard = math.ceil(lost) + 2 * _GUARD
        else:
            guard *= 2
    raise PrecisionError(f"bessel_k({nu}, {x}) lost too many bits to cancellation")
