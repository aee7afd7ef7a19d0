import json
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from perturbed_laguerre import series
from perturbed_laguerre.errors import DomainError, SeriesError
from perturbed_laguerre.precision import PrecisionCtx
from perturbed_laguerre.series import (
    INFINITY,
    PuiseuxSeries,
    alpha_value,
    c_large_series,
    c_small_series,
    ctilde_series,
    delta_log_large_series,
    delta_log_small_series,
    eval_series,
    h_large_series,
    h_small_series,
    ratio_expansion,
    sigma_residual_h,
    substitution_residual_c,
)
from perturbed_laguerre.verification import GOLDEN_ALPHAS, GOLDEN_TABLES, golden_mismatches

HALF = Fr(1, 2)
CTX = PrecisionCtx(256)
M = CTX.mp

non_integer_alpha = st.fractions(min_value=Fr(1, 10), max_value=6, max_denominator=12).filter(
    lambda a: a.denominator != 1)


def test_c_small_values_at_half():
    # by hand from the rational forms at alpha^2 = 1/4:
    # -1/(q(q-1)), 3/(a^3 (q-1)(q-4)), -6(2q-3)/(a^4 (q-1)^2 (q-4)(q-9))
    ser = c_small_series(HALF, 4)
    assert ser.terms == ((0, Fr(2)), (1, Fr(16, 3)), (2, Fr(128, 15)), (3, Fr(4096, 315)))
    assert ser.is_exact()


def test_c_large_leading_terms():
    ser = c_large_series(HALF, 4)
    assert ser.terms[:2] == ((Fr(-1, 3), 1), (Fr(-2, 3), Fr(-1, 6)))
    assert ser.coeff(Fr(-1)) == 0


@pytest.mark.parametrize("alpha", GOLDEN_ALPHAS)
def test_golden_tables_except_the_misprinted_sign(alpha):
    bad = golden_mismatches(alpha)
    # the only disagreement is the s^5 coefficient of the printed H table,
    # whose sign contradicts the other two printed tables
    assert all(b.startswith("H small-s[5]") for b in bad), bad
    if alpha.denominator != 1:
        assert len(bad) == 1


def test_h_s5_sign_is_fixed_by_the_other_tables():
    for a in (HALF, Fr(7, 2), Fr(5, 3)):
        C = c_small_series(a, 6)
        H = h_small_series(a, 6)
        L = delta_log_small_series(a, 6)
        # H' = -C/2 and H = s d/ds ln Delta, coefficient by coefficient
        for k in range(1, 6):
            assert k * H.coeff(k) == -C.coeff(k - 1) / 2
            assert H.coeff(k) == k * L.coeff(k)


def test_integer_alpha_is_refused_at_small_s():
    for gen in (c_small_series, h_small_series, delta_log_small_series):
        with pytest.raises(DomainError):
            gen(3, 4)
    # the large-s tables stay defined
    assert c_large_series(3, 4).coeff(Fr(-4, 3)) == Fr(3 * 8, 81)


@given(non_integer_alpha)
@settings(max_examples=15)
def test_small_s_series_solve_their_equations(a):
    C = c_small_series(a, 8)
    res = substitution_residual_c(C)
    assert all(v == 0 for e, v in res.c.items() if e < C.order)
    H = h_small_series(a, 8)
    res = sigma_residual_h(H)
    assert all(v == 0 for e, v in res.c.items() if e < H.order + 1)


@given(st.fractions(min_value=0, max_value=6, max_denominator=12))
@settings(max_examples=15)
def test_large_s_series_solve_the_c_equation(a):
    C = c_large_series(a, 10)
    res = substitution_residual_c(C)
    assert all(v == 0 for e, v in res.c.items() if e < -3 * C.order)


def test_c_small_series_against_numerical_derivatives():
    # independent route: differentiate the summed series numerically
    a = Fr(3, 10)
    ser = c_small_series(a, 20)
    al = M.mpf(3) / 10
    f = lambda s: eval_series(ser, s, CTX)[0]
    s = M.mpf("0.002")
    # the summed series is only good to the working precision, so use a fixed step
    h = M.mpf("1e-15")
    C, C1, C2 = f(s), M.diff(f, s, 1, h=h), M.diff(f, s, 2, h=h)
    # same equation in d/ds form: C(s^2 C'' + s C') - s^2 C'^2 - s C^3 - alpha C + 1
    res = C * (s * s * C2 + s * C1) - (s * C1) ** 2 - s * C ** 3 - al * C + 1
    assert abs(res) < 1e-20


@pytest.mark.parametrize("s", ["0.01", "100", "5000"])
def test_ctilde_against_cubic_root(s):
    a = M.mpf(1.5)
    s_ = M.mpf(s)
    root = M.findroot(lambda c: s_ * c ** 3 + a * c - 1, 1 / a if s_ < 1 else M.cbrt(1 / s_))
    origin = series.ZERO if s_ < 1 else INFINITY
    ser = ctilde_series(Fr(3, 2), 30, origin)
    val, err = eval_series(ser, s_, CTX)
    assert abs(val - root) < max(10 * err, 1e-60)


def test_delta_large_misses_nothing_at_s_minus_two():
    # the s^-2 term of ln Delta is -(1/2) x the s^-2 term of H; it is absent from print
    for a in (HALF, Fr(7, 2), Fr(2)):
        L = delta_log_large_series(a, 9)
        H = h_large_series(a, 9)
        q = a * a
        assert L.coeff(-2) == H.coeff(-2) / -2
        assert L.coeff(-2) == (8 * q ** 3 - 41 * q ** 2 + 33 * q) / 52488


def test_ratio_expansion_is_difference_of_shifted_series():
    a = Fr(5, 4)
    r = ratio_expansion(a, 6)
    hi, lo = delta_log_large_series(a + 1, 8), delta_log_large_series(a, 8)
    for e, c in r.terms:
        assert c == hi.coeff(e) - lo.coeff(e)
    assert r.log_coeff == hi.log_coeff - lo.log_coeff
    assert r.const_slot == "c2"


def test_json_round_trip():
    for ser in (c_small_series(HALF, 5), delta_log_large_series(HALF, 6), ratio_expansion(HALF, 7)):
        doc = json.loads(json.dumps(ser.to_json()))
        back = PuiseuxSeries.from_json(doc, CTX)
        assert back.terms == ser.terms
        assert back.log_coeff == ser.log_coeff
        assert back.order == ser.order
        assert back.const_slot == ser.const_slot


def test_eval_series_errors():
    with pytest.raises(SeriesError):
        eval_series(ratio_expansion(HALF, 7), 50, CTX)  # c2 not supplied
    with pytest.raises(SeriesError):
        eval_series(c_large_series(HALF, 5), "0.5", CTX)
    with pytest.raises(SeriesError):
        eval_series(c_large_series(HALF, 3), 2, CTX, tol=1e-30)
    with pytest.raises(DomainError):
        eval_series(c_small_series(HALF, 3), 0, CTX)
    with pytest.raises(SeriesError):
        c_small_series(HALF, 4).coeff(7)


def test_series_construction_errors():
    with pytest.raises(SeriesError):
        PuiseuxSeries(series.ZERO, HALF, ((Fr(1), 1), (Fr(0), 1)), Fr(2))
    with pytest.raises(DomainError):
        PuiseuxSeries("middle", HALF, (), Fr(0))
    with pytest.raises(DomainError):
        c_small_series(Fr(-1, 2), 3)


def test_alpha_value_reads_decimals():
    assert alpha_value(0.3) == Fr(3, 10)
    assert alpha_value("7/2") == Fr(7, 2)
    assert alpha_value(M.mpf(0.5)) == HALF
    with pytest.raises(DomainError):
        alpha_value(float("nan"))


def test_golden_registry_covers_every_table():
    names = {name for name, *_ in GOLDEN_TABLES}
    assert len(names) == 9
