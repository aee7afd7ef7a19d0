import pytest
from hypothesis import given, strategies as st

from perturbed_laguerre.errors import DomainError
from perturbed_laguerre.precision import PrecisionCtx
from perturbed_laguerre.special_functions import barnes_g_log, bessel_k, log_gamma, zeta_int

CTX = PrecisionCtx(256)
M = CTX.mp
TOL = 10 * CTX.tol


def rel(x, y):
    return abs(x - y) / max(1, abs(y))


@pytest.mark.parametrize("x", ["0.25", "1", "1.5", "7.75", "40", "1e-5", "2000.5"])
def test_log_gamma_against_mpmath(x):
    x = M.mpf(x)
    assert rel(log_gamma(x, CTX), M.loggamma(x)) <= TOL


def test_log_gamma_small_integers():
    assert log_gamma(1, CTX) == 0
    assert rel(log_gamma(5, CTX), M.log(24)) <= TOL


def test_log_gamma_domain():
    with pytest.raises(DomainError):
        log_gamma(0, CTX)
    with pytest.raises(DomainError):
        log_gamma(-1.5, CTX)


@pytest.mark.parametrize("k", [2, 3, 4, 7, 20, 60])
def test_zeta_against_mpmath(k):
    assert rel(zeta_int(k, CTX), M.zeta(k)) <= TOL


def test_zeta_two_is_pi_squared_over_six():
    assert rel(zeta_int(2, CTX), M.pi ** 2 / 6) <= TOL


def test_barnes_g_special_values():
    # G(1) = G(2) = G(3) = 1, G(4) = 2, G(5) = 12
    for z, v in ((1, 1), (2, 1), (3, 1), (4, 2), (5, 12)):
        assert abs(barnes_g_log(z, CTX) - M.log(v)) <= TOL
    # G(1/2) = 2^(1/24) e^(1/8) pi^(-1/4) A^(-3/2), A = Glaisher's constant
    g_half = M.log(2) / 24 + M.mpf(1) / 8 - M.log(M.pi) / 4 - 3 * M.log(M.glaisher) / 2
    assert rel(barnes_g_log(M.mpf(1) / 2, CTX), g_half) <= TOL


@pytest.mark.parametrize("z", ["0.1", "0.5", "1.5", "3.3", "9.9", "25.5"])
def test_barnes_g_against_mpmath(z):
    z = M.mpf(z)
    assert rel(barnes_g_log(z, CTX), M.log(M.barnesg(z))) <= TOL


@given(st.fractions(min_value=0.05, max_value=30))
def test_barnes_functional_relation(z):
    z = M.mpf(z.numerator) / z.denominator
    lhs = barnes_g_log(z + 1, CTX) - barnes_g_log(z, CTX)
    assert rel(lhs, log_gamma(z, CTX)) <= TOL


@pytest.mark.parametrize("nu,x", [("0", "0.01"), ("0.5", "1"), ("1", "3"), ("2.5", "0.2"),
                                   ("7", "30"), ("12.25", "5"), ("0.75", "80"), ("40", "2")])
def test_bessel_k_against_mpmath(nu, x):
    nu, x = M.mpf(nu), M.mpf(x)
    ref = M.besselk(nu, x)
    assert abs(bessel_k(nu, x, CTX) - ref) / ref <= TOL


def test_bessel_half_integer_closed_form():
    # K_{1/2}(x) = sqrt(pi/(2x)) e^-x
    x = M.mpf("1.7")
    assert rel(bessel_k(M.mpf(1) / 2, x, CTX), M.sqrt(M.pi / (2 * x)) * M.exp(-x)) <= TOL


@given(st.fractions(min_value=0, max_value=15), st.fractions(min_value=0.05, max_value=40))
def test_bessel_recurrence_and_symmetry(nu, x):
    nu = M.mpf(nu.numerator) / nu.denominator
    x = M.mpf(x.numerator) / x.denominator
    km, k0, kp = (bessel_k(nu + d, x, CTX) for d in (-1, 0, 1))
    assert abs(kp - km - 2 * nu / x * k0) / kp <= TOL
    assert abs(bessel_k(-nu, x, CTX) - k0) / k0 <= TOL


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_k(1, 0, CTX)


def test_exact_rational_arguments():
    from fractions import Fraction

    assert rel(barnes_g_log(Fraction(5, 2), CTX), M.log(M.barnesg(M.mpf(5) / 2))) <= TOL
    assert rel(log_gamma(Fraction(1, 3), CTX), M.loggamma(M.mpf(1) / 3)) <= TOL
    assert rel(bessel_k(Fraction(1, 2), Fraction(3, 2), CTX), M.besselk(M.mpf(0.5), M.mpf(1.5))) <= TOL
