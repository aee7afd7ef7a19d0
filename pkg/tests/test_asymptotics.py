from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from perturbed_laguerre.asymptotics import (
    c1_conjectured,
    c2_constant,
    convergence_csv,
    fit_constant_c2,
    origin_asymptotics,
    pn0_asymptotic,
    pn0_ratio_check,
    s1_asymptotic,
    s1_at_zero,
    s2_asymptotic,
    s2_at_zero,
)
from perturbed_laguerre.coulomb_fluid import FluidEndpoints, solve_endpoints
from perturbed_laguerre.errors import DomainError
from perturbed_laguerre.hankel import WeightParams, log_pn0_ratio
from perturbed_laguerre.precision import PrecisionCtx

HALF = Fr(1, 2)
CTX = PrecisionCtx(256)
M = CTX.mp
TOL = 10 * CTX.tol


def test_constants_at_alpha_one():
    # Gamma(2) = 1 and G(2) = 1
    assert abs(c2_constant(1, CTX) + M.log(2 * M.pi) / 2) <= TOL
    assert abs(c1_conjectured(1, CTX) + M.log(2 * M.pi) / 2) <= TOL


def test_constants_against_mpmath():
    a = M.mpf(7) / 10
    assert abs(c2_constant(Fr(7, 10), CTX) - (M.loggamma(1 + a) - M.log(2 * M.pi) / 2)) <= TOL
    ref = M.log(M.barnesg(1 + a)) - a / 2 * M.log(2 * M.pi)
    assert abs(c1_conjectured(Fr(7, 10), CTX) - ref) <= TOL


@given(st.fractions(Fr(1, 20), 8))
def test_c1_c2_relation(a):
    gap = c1_conjectured(a + 1, CTX) - c1_conjectured(a, CTX) - c2_constant(a, CTX)
    assert abs(gap) <= TOL


def test_constants_reject_nonpositive_alpha():
    with pytest.raises(DomainError):
        c2_constant(0, CTX)
    with pytest.raises(DomainError):
        c1_conjectured(-1, CTX)


def test_s1_degenerate_support_and_plug_in():
    p = WeightParams(HALF, 1, CTX)
    assert s1_at_zero(FluidEndpoints(M.mpf(2), M.mpf(2), M.mpf(2), 1, p)) == 0
    a, b = M.mpf(1), M.mpf(16)
    # (b/a)^(1/4) = 2: ln((2 + 1/2)/2)
    assert abs(s1_at_zero(FluidEndpoints(a, b, M.mpf(4), 1, p)) - M.log(M.mpf(5) / 4)) <= TOL
    with pytest.raises(DomainError):
        s1_at_zero(FluidEndpoints(b, a, M.mpf(4), 1, p))


def test_origin_terms_approach_their_large_n_forms():
    p = WeightParams(HALF, 1, CTX)
    g1, g2, g3 = [], [], []
    for n in (10 ** 4, 10 ** 6, 10 ** 8):
        ep = solve_endpoints(n, p)
        g1.append(abs(s1_at_zero(ep) - s1_asymptotic(n, 1, CTX)))
        g2.append(abs(s2_at_zero(n, p, ep) - s2_asymptotic(n, 1, HALF, CTX)))
        g3.append(abs(origin_asymptotics(n, p).log_pn0 - pn0_asymptotic(n, 1, HALF, CTX)))
    for g in (g1, g2, g3):
        assert g[0] > g[1] > g[2]
        assert g[2] < 2e-3


def test_s2_needs_positive_t():
    with pytest.raises(DomainError):
        s2_at_zero(5, WeightParams(HALF, 0, CTX))


def test_log_pn0_ratio_at_t_zero():
    assert abs(log_pn0_ratio(12, 0, HALF, CTX)) <= TOL


def test_ratio_approaches_its_double_scaled_limit():
    # exact finite-n ratio against the large-s series at s = 20: the gap halves with n
    r30 = pn0_ratio_check(30, 20, HALF, CTX)
    r60 = pn0_ratio_check(60, 20, HALF, CTX)
    assert r30.corollary == r60.corollary
    g30, g60 = abs(r30.exact - r30.corollary), abs(r60.exact - r60.corollary)
    assert 1.6 < g30 / g60 < 2.4
    assert r60.t == M.mpf(20) / M.mpf(121.5)


def test_ratio_check_guards():
    with pytest.raises(DomainError):
        pn0_ratio_check(5, 0, HALF, CTX)
    with pytest.raises(DomainError):
        pn0_ratio_check(2, 30, HALF, CTX)  # t > 2
    r = pn0_ratio_check(20, "0.5", HALF, CTX)
    assert M.isnan(r.corollary)


def test_convergence_csv_columns():
    rows = [pn0_ratio_check(n, 5, HALF, CTX) for n in (10, 20)]
    lines = convergence_csv(rows, CTX).splitlines()
    assert lines[0] == "n,exact,asymptotic,difference"
    assert lines[1].startswith("10,") and len(lines) == 3


def test_c2_from_the_integrated_determinants():
    # ln Delta(s, 3/2) - ln Delta(s, 1/2) minus its non-constant terms tends to c2(1/2)
    fit, spread = fit_constant_c2(HALF, [50, 75, 100], CTX, tol=1e-20)
    assert abs(fit - c2_constant(HALF, CTX)) <= 1e-5
    assert spread <= 1e-5
    with pytest.raises(DomainError):
        fit_constant_c2(HALF, [10], CTX)
