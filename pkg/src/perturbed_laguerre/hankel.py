"""Finite-n objects for the weight x^alpha exp(-x - t/x) on (0, inf).

Moments, Hankel determinants, recurrence coefficients of the monic
orthogonal polynomials, P_n(0) and the finite-n Painleve III checks.

Hankel matrices of moments are badly conditioned: roughly 3n bits are lost
in the factorisation.  Every routine therefore works with ``4n + 64``
guard bits on top of the requested precision and rounds its results back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import ConsistencyError, DomainError, PrecisionError
from .precision import PrecisionCtx, as_ctx, to_mpf
from .special_functions import barnes_g_log, bessel_k, log_gamma


def hankel_guard_bits(n: int) -> int:
    return 4 * int(n) + 64


@dataclass(frozen=True)
class WeightParams:
    """Parameters (alpha, t) of the weight plus the precision context.

    ``alpha`` must be positive.  The moment routines alone also make sense
    for -1 < alpha <= 0; pass ``allow_nonpositive_alpha=True`` to build such
    a parameter set.  Determinant-level routines still reject it.
    """

    alpha: object
    t: object = 0
    ctx: PrecisionCtx | None = None
    allow_nonpositive_alpha: bool = False

    def __post_init__(self):
        ctx = as_ctx(self.ctx)
        object.__setattr__(self, "ctx", ctx)
        M = ctx.mp
        alpha = to_mpf(M, self.alpha)
        t = to_mpf(M, self.t)
        if self.allow_nonpositive_alpha:
            if not alpha > -1:
                raise DomainError(f"moments need alpha > -1, got {alpha}")
        elif not alpha > 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        if not t >= 0:
            raise DomainError(f"t must be non-negative, got {t}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "t", t)

    def require_positive_alpha(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")

    def replace(self, **changes) -> "WeightParams":
        fields = dict(alpha=self.alpha, t=self.t, ctx=self.ctx,
                      allow_nonpositive_alpha=self.allow_nonpositive_alpha)
        fields.update(changes)
        return WeightParams(**fields)


@dataclass(frozen=True)
class MomentVector:
    mu: tuple
    params: WeightParams

    def __len__(self):
        return len(self.mu)

    def __getitem__(self, j):
        return self.mu[j]

    def is_log_convex(self) -> bool:
        return all(self.mu[j] ** 2 <= self.mu[j - 1] * self.mu[j + 1]
                   for j in range(1, len(self.mu) - 1))


class LogDet(NamedTuple):
    log: object
    sign: int


@dataclass(frozen=True)
class RecurrenceData:
    """Norms h_j and recurrence coefficients alpha_j, beta_j for j < n.

    ``b[0]`` is mu_0 by the usual convention, so that h_j = b_0 b_1 ... b_j.
    """

    n: int
    h: tuple
    a: tuple
    b: tuple


@dataclass(frozen=True)
class FiniteNDiagnostics:
    H_n: object
    dH: object
    d2H: object
    y_n: object
    sigma_residual: object
    ode_residual: object
    step: object


# ---------------------------------------------------------------- moments


def _moment_pair(params: WeightParams, M):
    """mu_0 and mu_1 at the precision of ``M`` via the Bessel-K closed form."""
    alpha, t = M.mpf(params.alpha), M.mpf(params.t)
    inner = PrecisionCtx(M.prec)
    if t == 0:
        g0 = M.exp(M.mpf(log_gamma(alpha + 1, inner)))
        return g0, g0 * (alpha + 1)
    x = 2 * M.sqrt(t)
    out = []
    for j in (0, 1):
        nu = j + alpha + 1
        out.append(2 * t ** (nu / 2) * M.mpf(bessel_k(nu, x, inner)))
    return out[0], out[1]


def _moment_list(count: int, params: WeightParams, M) -> list:
    mu0, mu1 = _moment_pair(params, M)
    mu = [mu0, mu1][:count]
    alpha, t = M.mpf(params.alpha), M.mpf(params.t)
    # integration by parts: mu_{j+1} = (j+alpha+1) mu_j + t mu_{j-1}; all
    # terms are positive, so the forward direction is stable
    for j in range(1, count - 1):
        mu.append((j + alpha + 1) * mu[j] + t * mu[j - 1])
    return mu


def moment(j: int, params: WeightParams):
    """mu_j(t) = int_0^inf x^(j+alpha) exp(-x - t/x) dx.

    Gamma(j+alpha+1) at t = 0, otherwise 2 t^(nu/2) K_nu(2 sqrt t) with
    nu = j + alpha + 1.
    """
    if int(j) != j or j < 0:
        raise DomainError(f"moment index must be a non-negative integer, got {j!r}")
    ctx = params.ctx
    M = ctx.working(32)
    alpha, t = M.mpf(params.alpha), M.mpf(params.t)
    nu = int(j) + alpha + 1
    inner = PrecisionCtx(M.prec)
    if t == 0:
        return ctx.round(M.exp(M.mpf(log_gamma(nu, inner))))
    return ctx.round(2 * t ** (nu / 2) * M.mpf(bessel_k(nu, 2 * M.sqrt(t), inner)))


def moments(count: int, params: WeightParams, extra_bits: int = 0) -> MomentVector:
    """mu_0 .. mu_{count-1}, carried at ``bits + extra_bits + 32``."""
    if count < 1:
        raise DomainError("need at least one moment")
    M = params.ctx.working(int(extra_bits) + 32)
    return MomentVector(tuple(_moment_list(count, params, M)), params)


def moment_oracle(j: int, params: WeightParams):
    """Independent value of mu_j by double-exponential quadrature.

    With x = sqrt(t) e^v the integrand becomes
    t^(nu/2) exp(nu v - 2 sqrt(t) cosh v), which decays doubly
    exponentially in both directions; the two halves v < 0 and v > 0
    on either side of the peak are integrated separately by tanh-sinh over
    the window outside of which the integrand is below 2^-prec.  For t = 0
    the substitution x = e^v gives exp(nu v - e^v).
    """
    from .errors import QuadratureError

    if int(j) != j or j < 0:
        raise DomainError(f"moment index must be a non-negative integer, got {j!r}")
    ctx = params.ctx
    M = ctx.working(32)
    nu = int(j) + M.mpf(params.alpha) + 1
    t = M.mpf(params.t)
    if t == 0:
        g = lambda v: nu * v - M.exp(v)
        scale = M.one
        peak = M.log(nu)
    else:
        r = M.sqrt(t)
        g = lambda v: nu * v - 2 * r * M.cosh(v)
        scale = t ** (nu / 2)
        peak = M.asinh(nu / (2 * r))
    # the log-integrand is concave; walk out until it is 2^-prec below the peak
    floor = g(peak) - (M.prec + 16) * M.ln2
    ends = []
    for sign in (-1, 1):
        width = M.one
        while g(peak + sign * width) > floor:
            width *= 2
        ends.append(peak + sign * width)
    f = lambda v: M.exp(g(v))
    value, err = M.quad(f, [ends[0], peak, ends[1]], error=True, method="tanh-sinh")
    value = value * scale
    err = abs(err * scale)
    if err > ctx.tol * abs(value):
        raise QuadratureError(f"moment_oracle({j}) did not converge", achieved=err)
    return ctx.round(value)


# ---------------------------------------------------------- factorisations


def _cholesky_ldl(mu: Sequence, size: int, M):
    """LDL^T of the Hankel matrix [mu_{i+k}], i, k < size.

    Returns the pivots d_j and the subdiagonal entries L_{j+1,j}.
    """
    A = [[mu[i + k] for k in range(size)] for i in range(size)]
    L = [[M.zero] * size for _ in range(size)]
    d = []
    for j in range(size):
        acc = A[j][j]
        for k in range(j):
            acc -= L[j][k] * L[j][k] * d[k]
        if not acc > 0:
            raise PrecisionError(
                f"Hankel pivot {j} is not positive ({M.nstr(acc, 5)}); increase bits"
            )
        d.append(acc)
        L[j][j] = M.one
        for i in range(j + 1, size):
            acc = A[i][j]
            for k in range(j):
                acc -= L[i][k] * L[j][k] * d[k]
            L[i][j] = acc / d[j]
    sub = [L[j + 1][j] for j in range(size - 1)]
    return d, sub


def _chebyshev(mu: Sequence, n: int, M):
    """Chebyshev's algorithm: alpha_k, beta_k for k < n from mu_0..mu_{2n-1}."""
    width = 2 * n
    sig_prev = [M.zero] * width
    sig = list(mu[:width])
    a = [mu[1] / mu[0]]
    b = [mu[0]]
    for k in range(1, n):
        new = [M.zero] * width
        ak, bk = a[k - 1], b[k - 1]
        for l in range(k, width - k):
            new[l] = sig[l + 1] - ak * sig[l] - bk * sig_prev[l]
        if not new[k] > 0:
            raise PrecisionError(
                f"Hankel pivot {k} is not positive ({M.nstr(new[k], 5)}); increase bits"
            )
        a.append(new[k + 1] / new[k] - sig[k] / sig[k - 1])
        b.append(new[k] / sig[k - 1])
        sig_prev, sig = sig, new
    return a, b


def _pick_method(n: int, method: str | None) -> str:
    if method is None:
        return "cholesky" if n <= 48 else "chebyshev"
    if method not in ("cholesky", "chebyshev"):
        raise DomainError(f"unknown factorisation method {method!r}")
    return method


def _recurrence_raw(n: int, params: WeightParams, method: str | None, M):
    """(h, a, b) for j < n at the precision of M, from fresh moments."""
    method = _pick_method(n, method)
    mu = _moment_list(2 * n + 1, params, M)
    if method == "cholesky":
        d, sub = _cholesky_ldl(mu, n + 1, M)
        h = d[:n]
        a = [sub[0]] + [sub[j] - sub[j - 1] for j in range(1, n)]
        b = [mu[0]] + [h[j] / h[j - 1] for j in range(1, n)]
    else:
        a, b = _chebyshev(mu, n, M)
        h = []
        acc = M.one
        for bj in b:
            acc *= bj
            h.append(acc)
    return h, a, b


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def recurrence_coeffs(n: int, params: WeightParams, method: str | None = None) -> RecurrenceData:
    """h_j, alpha_j, beta_j for j = 0..n-1.

    ``method="cholesky"`` factors the (n+1)x(n+1) moment matrix as LDL^T:
    the pivots are the h_j and alpha_j = L_{j+1,j} - L_{j,j-1}.
    ``method="chebyshev"`` runs Chebyshev's O(n^2) algorithm on the same
    moments.  The default picks Cholesky for n <= 48.
    """
    n = _check_n(n)
    params.require_positive_alpha()
    ctx = params.ctx
    M = ctx.working(hankel_guard_bits(n))
    h, a, b = _recurrence_raw(n, params, method, M)
    r = ctx.round
    return RecurrenceData(n, tuple(map(r, h)), tuple(map(r, a)), tuple(map(r, b)))


def _logdet_raw(n, params, method, M):
    h, _, _ = _recurrence_raw(n, params, method, M)
    return M.fsum(M.log(x) for x in h)


def hankel_det(n: int, params: WeightParams, method: str | None = None) -> LogDet:
    """ln D_n(t, alpha) as (log, sign); D_n is the product of the pivots h_j."""
    n = _check_n(n)
    params.require_positive_alpha()
    ctx = params.ctx
    M = ctx.working(hankel_guard_bits(n))
    return LogDet(ctx.round(_logdet_raw(n, params, method, M)), 1)


def laguerre_det_closed_form(n: int, alpha, ctx: PrecisionCtx | None = None):
    """ln D_n(0, alpha) = ln G(n+1) + ln G(n+alpha+1) - ln G(alpha+1)."""
    n = _check_n(n)
    ctx = as_ctx(ctx)
    M = ctx.working(16)
    alpha = to_mpf(M, alpha)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    inner = PrecisionCtx(M.prec)
    val = (barnes_g_log(n + 1, inner) + barnes_g_log(n + alpha + 1, inner)
           - barnes_g_log(alpha + 1, inner))
    return ctx.round(val)


def _log_pn0_closed_form(n, alpha, M):
    """ln (-1)^n P_n(0) for the classical Laguerre weight: ln Gamma(n+alpha+1)/Gamma(alpha+1)."""
    inner = PrecisionCtx(M.prec)
    return M.mpf(log_gamma(n + alpha + 1, inner)) - M.mpf(log_gamma(alpha + 1, inner))


def pn_at_zero(n: int, params: WeightParams, method: str | None = None, log: bool = False):
    """(-1)^n P_n(0; t, alpha), which is always positive.

    Computed as the determinant ratio D_n(t, alpha+1)/D_n(t, alpha) and
    independently by running the three-term recurrence at z = 0; the two
    must agree to 1e3 * target_tol or :class:`ConsistencyError` is raised.
    With ``log=True`` the logarithm is returned.
    """
    n = _check_n(n)
    params.require_positive_alpha()
    ctx = params.ctx
    M = ctx.working(hankel_guard_bits(n + 1))
    # path (i): ratio of determinants, with the shifted moments mu_j(alpha+1) = mu_{j+1}(alpha)
    up = params.replace(alpha=M.mpf(params.alpha) + 1)
    ratio_log = _logdet_raw(n, up, method, M) - _logdet_raw(n, params, method, M)
    # path (ii): q_k = (-1)^k P_k(0) obeys q_{k+1} = alpha_k q_k - beta_k q_{k-1}
    _, a, b = _recurrence_raw(n, params, method, M)
    q_prev, q = M.zero, M.one
    for k in range(n):
        q_prev, q = q, a[k] * q - (b[k] * q_prev if k > 0 else 0)
    if not q > 0:
        raise ConsistencyError(f"recurrence gave (-1)^n P_n(0) = {M.nstr(q, 5)} <= 0")
    rec_log = M.log(q)
    if abs(ratio_log - rec_log) > 1e3 * ctx.target_tol * max(1, abs(ratio_log)):
        raise ConsistencyError(
            f"P_n(0) paths disagree: ratio {M.nstr(ratio_log, 20)} vs recurrence {M.nstr(rec_log, 20)}"
        )
    return ctx.round(ratio_log if log else M.exp(ratio_log))


# --------------------------------------------------------- finite-n checks

_D1 = ((-2, 1), (-1, -8), (1, 8), (2, -1))  # / 12h
_D2 = ((-2, -1), (-1, 16), (0, -30), (1, 16), (2, -1))  # / 12h^2
_D3 = ((-2, -1), (-1, 2), (1, -2), (2, 1))  # / 2h^3


def _stencil(f, h):
    d1 = sum(w * f[k] for k, w in _D1) / (12 * h)
    d2 = sum(w * f[k] for k, w in _D2) / (12 * h * h)
    d3 = sum(w * f[k] for k, w in _D3) / (2 * h**3)
    return d1, d2, d3


def finite_n_diagnostics(n: int, params: WeightParams, step=None,
                         method: str | None = None) -> FiniteNDiagnostics:
    """Residuals of the finite-n sigma form and of the y_n equation.

    H_n = t d/dt ln D_n and its first two t-derivatives come from 5-point
    central differences of ln D_n (step defaults to t 2^(-bits/5)).  The
    sigma residual is reported in absolute terms; the y_n residual is
    relative to max(1, |y_n''|).
    """
    n = _check_n(n)
    params.require_positive_alpha()
    ctx = params.ctx
    M = ctx.working(hankel_guard_bits(n + 2))
    t = M.mpf(params.t)
    alpha = M.mpf(params.alpha)
    h = to_mpf(M, step) if step is not None else t * M.ldexp(1, -(ctx.bits // 5))
    if not h > 0:
        raise DomainError("step must be positive")
    if not t > 2 * h:
        raise DomainError(f"need t > 2*step, got t={t}, step={h}")

    L, Y = {}, {}
    for k in range(-2, 3):
        p = params.replace(t=t + k * h, ctx=PrecisionCtx(M.prec))
        hh, a, _ = _recurrence_raw(n + 1, p, method, M)
        L[k] = M.fsum(M.log(x) for x in hh[:n])
        Y[k] = a[n] - (2 * n + 1 + alpha)

    # roundoff in the third difference is about eps |L| / h^3
    eps = M.ldexp(1, -ctx.bits)
    if eps * max(1, abs(L[0])) / h**3 > M.ldexp(1, -(ctx.bits // 4)):
        raise PrecisionError(f"step {M.nstr(h, 3)} is too small for {ctx.bits} bits")

    L1, L2, L3 = _stencil(L, h)
    H = t * L1
    dH = L1 + t * L2
    d2H = 2 * L2 + t * L3
    sigma = abs((t * d2H) ** 2 - (n - (2 * n + alpha) * dH) ** 2
                + 4 * (n * (n + alpha) + t * dH - H) * dH * (dH - 1))

    y = Y[0]
    y1, y2, _ = _stencil(Y, h)
    rhs = (y1**2 / y - y1 / t + (2 * n + 1 + alpha) * y**2 / t**2
           + y**3 / t**2 + alpha / t - 1 / y)
    ode = abs(y2 - rhs) / max(1, abs(y2))
    r = ctx.round
    return FiniteNDiagnostics(r(H), r(dH), r(d2H), r(y), r(sigma), r(ode), r(h))


def y_n(n: int, params: WeightParams, method: str | None = None):
    """y_n(t) = alpha_n(t) - (2n+1+alpha)."""
    n = int(n)
    params.require_positive_alpha()
    ctx = params.ctx
    M = ctx.working(hankel_guard_bits(n + 2))
    _, a, _ = _recurrence_raw(n + 1, params, method, M)
    return ctx.round(a[n] - (2 * n + 1 + M.mpf(params.alpha)))


def scaled_ratio(n: int, s, alpha, ctx: PrecisionCtx | None = None,
                 method: str | None = None):
    """ln D_n(s/(2n+1+alpha), alpha) - ln D_n(0, alpha)."""
    n = _check_n(n)
    ctx = as_ctx(ctx)
    M = ctx.working(hankel_guard_bits(n))
    s = to_mpf(M, s)
    alpha = to_mpf(M, alpha)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    params = WeightParams(alpha, s / (2 * n + 1 + alpha), PrecisionCtx(M.prec))
    return ctx.round(_logdet_raw(n, params, method, M)
                     - laguerre_det_closed_form(n, alpha, PrecisionCtx(M.prec)))


def log_pn0_ratio(n: int, t, alpha, ctx: PrecisionCtx | None = None,
                  method: str | None = None):
    """ln[(-1)^n P_n(0; t, alpha) / (-1)^n P_n(0; 0, alpha)]."""
    n = _check_n(n)
    ctx = as_ctx(ctx)
    M = ctx.working(hankel_guard_bits(n + 1))
    alpha = to_mpf(M, alpha)
    inner = PrecisionCtx(M.prec)
    at_t = pn_at_zero(n, WeightParams(alpha, to_mpf(M, t), inner), method=method, log=True)
    return ctx.round(at_t - _log_pn0_closed_form(n, alpha, M))
