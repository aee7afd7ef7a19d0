"""Precision contexts.

Every extended-precision quantity in the package is an ``mpmath`` ``mpf``
created by a private :class:`mpmath.MPContext`.  Contexts are cached per
thread and per precision so that no function ever touches the global
``mpmath.mp`` object.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DomainError, PrecisionError

DEFAULT_BITS = int(os.environ.get("PERTURBED_LAGUERRE_BITS", "256"))

_local = threading.local()


def mp_context(bits: int) -> mpmath.MPContext:
    """Return this thread's private mpmath context at ``bits`` of precision."""
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    ctx = cache.get(bits)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.prec = bits
        cache[bits] = ctx
    # never change ctx.prec on a cached context; ask for another one instead
    return ctx


def to_mpf(M: mpmath.MPContext, x):
    """Convert x to an mpf of context M.

    Fractions are divided at the context's precision and Python floats are
    read through their shortest repr, so 0.3 means 3/10 and not the binary
    double nearest to it.
    """
    if isinstance(x, Fraction):
        return M.mpf(x.numerator) / x.denominator
    if isinstance(x, float):
        return M.mpf(repr(x))
    return M.mpf(x)


def default_tol(bits: int):
    """10^-floor(bits*15/64); an mpf once the power leaves the float range."""
    k = math.floor(bits * 15 / 64)
    if k < 300:
        return 10.0 ** -k
    return mpmath.mpf(f"1e-{k}")


@dataclass(frozen=True)
class PrecisionCtx:
    """Mantissa size plus the relative accuracy requested from every routine."""

    bits: int = DEFAULT_BITS
    target_tol: float | None = None

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 64:
            raise DomainError(f"bits must be an integer >= 64, got {self.bits!r}")
        if self.target_tol is None:
            object.__setattr__(self, "target_tol", default_tol(self.bits))
        tol = self.target_tol
        if not isinstance(tol, mpmath.mpf):
            tol = float(tol)
        if not 0 < tol < 1:
            raise DomainError(f"target_tol must lie in (0, 1), got {tol!r}")
        if tol > mpmath.mpf(2) ** (-self.bits // 2):
            raise DomainError(
                f"target_tol={mpmath.nstr(tol, 3)} is looser than 2^(-bits/2) for bits={self.bits}; "
                "lower the precision instead"
            )
        object.__setattr__(self, "target_tol", tol)

    @property
    def mp(self) -> mpmath.MPContext:
        return mp_context(self.bits)

    @property
    def tol(self):
        return self.mp.mpf(self.target_tol)

    def working(self, extra: int) -> mpmath.MPContext:
        """A context with ``extra`` guard bits on top of ``bits``."""
        return mp_context(self.bits + int(extra))

    def with_bits(self, bits: int) -> "PrecisionCtx":
        """Same relative request scaled to a new precision."""
        return PrecisionCtx(bits, default_tol(bits))

    def check_reachable(self) -> None:
        if self.target_tol < mpmath.mpf(2) ** (2 - self.bits):
            raise PrecisionError(
                f"target_tol={mpmath.nstr(self.target_tol, 3)} cannot be met with {self.bits} bits"
            )

    def round(self, x):
        """Round any mpmath number (from any context) to this precision."""
        return self.mp.mpf(x)


DEFAULT_CTX = PrecisionCtx()


def as_ctx(ctx: PrecisionCtx | int | None) -> PrecisionCtx:
    if ctx is None:
        return DEFAULT_CTX
    if isinstance(ctx, PrecisionCtx):
        return ctx
    return PrecisionCtx(int(ctx))
