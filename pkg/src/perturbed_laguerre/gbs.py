"""Gragg-Bulirsch-Stoer extrapolation for smooth systems y' = f(s, y).

At 20 to 60 significant digits a fixed low-order Runge-Kutta pair needs
far too many steps; extrapolating the modified midpoint rule in h^2 raises
the order adaptively, so each step costs about as much as the accuracy
requires.  Arithmetic is delegated to the mpf values themselves.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import SingularityError

SEQ = (2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30, 32)


def _midpoint(f, s, y, H, nsub):
    h = H / nsub
    z0 = list(y)
    d = f(s, z0)
    z1 = [a + h * b for a, b in zip(z0, d)]
    for m in range(1, nsub):
        d = f(s + m * h, z1)
        z0, z1 = z1, [a + 2 * h * b for a, b in zip(z0, d)]
    d = f(s + H, z1)
    return [(a + b + h * c) / 2 for a, b, c in zip(z0, z1, d)]


def gbs_step(f, s, y, H, tol, max_columns=len(SEQ)):
    """One extrapolated step.

    Returns (y_new, error_estimate, columns_used); y_new is None when the
    tolerance was not reached with ``max_columns`` columns.
    """
    table = []
    err = None
    for k in range(max_columns):
        nk = SEQ[k]
        row = [_midpoint(f, s, y, H, nk)]
        for j in range(1, k + 1):
            r = (nk / SEQ[k - j]) ** 2 - 1
            row.append([a + (a - b) / r for a, b in zip(row[j - 1], table[k - 1][j - 1])])
        table.append(row)
        if k >= 2:
            err = max(abs(a - b) / max(1, abs(a)) for a, b in zip(row[k], row[k - 1]))
            if err <= tol:
                return row[k], err, k
    return None, err, max_columns


def integrate(f: Callable, s, y: Sequence, s_end, tol, h0, *, guard: Callable | None = None,
              min_step=None, on_step: Callable | None = None):
    """Adaptive integration from s to s_end (s_end > s).

    ``guard(s, y)`` may raise to abort on a trajectory leaving its domain;
    a step below ``min_step`` raises :class:`SingularityError`.
    ``on_step(s, y)`` is called after every accepted step.
    Returns (s, y, last_step).
    """
    H = h0
    y = list(y)
    while s < s_end:
        H = min(H, s_end - s)
        if min_step is not None and H < min_step and s_end - s > H:
            raise SingularityError(f"step size underflow near s = {s}", s=s)
        try:
            ynew, err, k = gbs_step(f, s, y, H, tol)
        except ZeroDivisionError:
            ynew = None
            k = len(SEQ)
        if ynew is None:
            H = H / 3
            if min_step is not None and H < min_step:
                raise SingularityError(f"step size underflow near s = {s}", s=s)
            continue
        if guard is not None:
            guard(s + H, ynew)
        s = s + H
        y = ynew
        if on_step is not None:
            on_step(s, y)
        if k < 7:
            H = H * 1.6
        elif k > 9:
            H = H / 1.3
    return s, y, H
