from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from perturbed_laguerre.errors import DomainError
from perturbed_laguerre.hankel import (
    WeightParams,
    finite_n_diagnostics,
    hankel_det,
    laguerre_det_closed_form,
    log_pn0_ratio,
    moment,
    moment_oracle,
    moments,
    pn_at_zero,
    recurrence_coeffs,
    scaled_ratio,
    y_n,
)
from perturbed_laguerre.precision import PrecisionCtx, to_mpf

HALF = Fraction(1, 2)
CTX = PrecisionCtx(256)
M = CTX.mp
TOL = 100 * CTX.tol


def rel(x, y):
    return abs(x - y) / max(1, abs(y))


def mp_moment(j, alpha, t):
    """Oracle straight from mpmath's own Gamma and K."""
    nu = j + alpha + 1
    if t == 0:
        return M.gamma(nu)
    return 2 * t ** (nu / 2) * M.besselk(nu, 2 * M.sqrt(t))


def mp_logdet(n, alpha, t):
    H = M.matrix(n, n)
    for i in range(n):
        for k in range(n):
            H[i, k] = mp_moment(i + k, alpha, t)
    return M.log(M.det(H))


def test_moment_half_alpha_closed_form():
    # alpha = 1/2, j = 0: nu = 3/2 and K_{3/2}(z) = sqrt(pi/(2z)) e^-z (1 + 1/z)
    t = M.mpf("0.7")
    z = 2 * M.sqrt(t)
    k32 = M.sqrt(M.pi / (2 * z)) * M.exp(-z) * (1 + 1 / z)
    assert rel(moment(0, WeightParams(HALF, t, CTX)), 2 * t ** M.mpf(0.75) * k32) <= TOL


@pytest.mark.parametrize("j", [0, 1, 5, 17])
@pytest.mark.parametrize("t", ["0", "1e-6", "0.3", "4"])
def test_moment_matches_quadrature(j, t):
    p = WeightParams(HALF, t, CTX)
    assert rel(moment(j, p), moment_oracle(j, p)) <= TOL * max(1, moment(j, p))


def test_moments_vector_matches_single_moments():
    p = WeightParams(Fraction(3, 4), Fraction(1, 3), CTX)
    mv = moments(12, p)
    for j in (0, 1, 7, 11):
        assert rel(mv[j], moment(j, p)) <= TOL * abs(mv[j])


def test_moments_at_alpha_zero_need_the_flag():
    with pytest.raises(DomainError):
        WeightParams(0, 0, CTX)
    p = WeightParams(0, 0, CTX, allow_nonpositive_alpha=True)
    assert moment(0, p) == 1
    assert rel(moment(3, p), 6) <= TOL
    with pytest.raises(DomainError):
        hankel_det(2, p)
    with pytest.raises(DomainError):
        WeightParams(-1, 0, CTX, allow_nonpositive_alpha=True)


def test_parameter_errors():
    with pytest.raises(DomainError):
        WeightParams(HALF, -1, CTX)
    with pytest.raises(DomainError):
        moment(-1, WeightParams(HALF, 0, CTX))
    with pytest.raises(DomainError):
        hankel_det(0, WeightParams(HALF, 0, CTX))
    with pytest.raises(DomainError):
        moments(0, WeightParams(HALF, 0, CTX))


@given(st.fractions(min_value=Fraction(1, 10), max_value=5),
       st.fractions(min_value=0, max_value=10))
@settings(max_examples=15)
def test_moments_are_log_convex(alpha, t):
    assert moments(10, WeightParams(alpha, t, CTX)).is_log_convex()


@pytest.mark.parametrize("t", ["0", "0.2", "3"])
def test_two_by_two_determinant(t):
    p = WeightParams(HALF, t, CTX)
    m0, m1, m2 = (mp_moment(j, M.mpf(0.5), M.mpf(t)) for j in range(3))
    assert rel(hankel_det(2, p).log, M.log(m0 * m2 - m1 * m1)) <= TOL
    rd = recurrence_coeffs(2, p)
    assert rel(rd.a[0], m1 / m0) <= TOL
    assert rel(rd.b[1], (m0 * m2 - m1 * m1) / m0 ** 2) <= TOL
    assert rel(rd.h[1], (m0 * m2 - m1 * m1) / m0) <= TOL


@pytest.mark.parametrize("n", [1, 4, 9])
@pytest.mark.parametrize("t", [Fraction(1, 10), Fraction(5, 2)])
def test_determinant_against_mpmath_det(n, t):
    a = M.mpf(3) / 7
    assert rel(hankel_det(n, WeightParams(Fraction(3, 7), t, CTX)).log, mp_logdet(n, a, to_mpf(M, t))) <= 1e-50


@pytest.mark.parametrize("n", [1, 3, 10, 30])
def test_laguerre_determinant_at_t_zero(n):
    # classical Laguerre norms h_j = j! Gamma(j + alpha + 1)
    a = M.mpf(5) / 2
    ref = M.fsum(M.log(M.factorial(j)) + M.loggamma(j + a + 1) for j in range(n))
    assert rel(hankel_det(n, WeightParams(Fraction(5, 2), 0, CTX)).log, ref) <= TOL
    assert rel(laguerre_det_closed_form(n, Fraction(5, 2), CTX), ref) <= TOL


def test_laguerre_recurrence_at_t_zero():
    rd = recurrence_coeffs(6, WeightParams(HALF, 0, CTX))
    for k in range(6):
        assert rel(rd.a[k], 2 * k + 1 + M.mpf(0.5)) <= TOL
    for k in range(1, 6):
        assert rel(rd.b[k], k * (k + M.mpf(0.5))) <= TOL


@pytest.mark.parametrize("n", [5, 40, 60])
def test_cholesky_and_chebyshev_agree(n):
    p = WeightParams(HALF, Fraction(7, 10), CTX)
    a = hankel_det(n, p, "cholesky").log
    b = hankel_det(n, p, "chebyshev").log
    assert rel(a, b) <= TOL
    ra = recurrence_coeffs(n, p, "cholesky")
    rb = recurrence_coeffs(n, p, "chebyshev")
    assert max(rel(x, y) for x, y in zip(ra.a + ra.b, rb.a + rb.b)) <= TOL


def test_pn_at_zero_laguerre():
    # (-1)^n P_n(0) = Gamma(n+alpha+1)/Gamma(alpha+1) for the classical weight
    a = M.mpf(0.5)
    for n in (1, 3, 12):
        ref = M.gamma(n + a + 1) / M.gamma(a + 1)
        assert rel(pn_at_zero(n, WeightParams(HALF, 0, CTX)), ref) <= TOL * ref


@pytest.mark.parametrize("n", [1, 2, 6])
def test_pn_at_zero_against_determinant_ratio(n):
    a, t = M.mpf(0.5), M.mpf(2)
    ref = mp_logdet(n, a + 1, t) - mp_logdet(n, a, t)
    assert rel(pn_at_zero(n, WeightParams(HALF, 2, CTX), log=True), ref) <= 1e-50


def test_log_pn0_ratio_vanishes_at_t_zero():
    assert abs(log_pn0_ratio(7, 0, HALF, CTX)) <= TOL


def test_finite_n_sigma_form_holds():
    d = finite_n_diagnostics(6, WeightParams(HALF, Fraction(3, 2), CTX))
    assert d.sigma_residual <= 1e-20
    assert d.ode_residual <= 1e-20
    assert d.step > 0


def test_y_n_vanishes_at_t_zero():
    assert abs(y_n(4, WeightParams(HALF, 0, CTX))) <= TOL


def test_scaled_ratio_approaches_double_scaled_limit():
    # ln Delta(10, 1/2) from the integrated C potential, frozen
    target = M.mpf("-3.90088240714")
    r50 = scaled_ratio(50, 10, HALF, CTX)
    r100 = scaled_ratio(100, 10, HALF, CTX)
    # leading correction is O(1/n): first-order Richardson
    extrap = 2 * r100 - r50
    assert abs(r100 - target) < abs(r50 - target)
    assert abs(extrap - target) <= 1e-3
