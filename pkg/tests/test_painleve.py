from fractions import Fraction as Fr

import pytest

from perturbed_laguerre import painleve
from perturbed_laguerre.errors import DomainError, SeriesError
from perturbed_laguerre.painleve import (
    algebraic_solution,
    c_equation_residual,
    cached_solution,
    hcal_derivatives,
    solve_c,
    verify_residuals,
)
from perturbed_laguerre.precision import PrecisionCtx
from perturbed_laguerre.series import c_large_series, eval_series, h_large_series

HALF = Fr(1, 2)
CTX = PrecisionCtx(256)
M = CTX.mp


@pytest.fixture(scope="module")
def sol_half():
    return cached_solution(HALF, 100, CTX)


@pytest.mark.parametrize("alpha", [0, 1])
@pytest.mark.parametrize("s", ["0.01", "1", "37.5", "1e4"])
def test_algebraic_solutions_solve_the_c_equation(alpha, s):
    C, Cp, C2 = algebraic_solution(alpha)(M.mpf(s))
    assert c_equation_residual(M.mpf(s), C, Cp, C2, alpha) <= 1e-70


def test_algebraic_solution_only_for_zero_and_one():
    with pytest.raises(DomainError):
        algebraic_solution(2)


def test_c_matches_large_s_series(sol_half):
    ser = c_large_series(HALF, 12)
    errs = []
    for s in (20, 50, 100):
        C = sol_half.state_at(s)[0]
        value, tail = eval_series(ser, s, CTX)
        errs.append(abs(C - value))
        assert errs[-1] <= 10 * tail + 1e-18
    # the matching improves as s grows
    assert errs[0] > errs[1] > errs[2]


def test_hcal_matches_large_s_series(sol_half):
    value, tail = eval_series(h_large_series(HALF, 12), 80, CTX)
    assert abs(sol_half.hcal(80) - value) <= 10 * tail + 1e-18


def test_ln_delta_agrees_with_finite_n_extrapolation(sol_half):
    # (8 r_400 - 6 r_200 + r_100)/3 with r_n = ln D_n(s/(2n+3/2))/D_n(0), computed
    # once with the Hankel engine and frozen here; the O(n^-3) remainder is ~1e-6
    assert abs(sol_half.delta(50) - M.mpf("-12.8270627779308")) <= 5e-6
    assert abs(sol_half.delta(10) - M.mpf("-3.90088201987505")) <= 1e-6


def test_residuals_are_small(sol_half):
    rep = verify_residuals(sol_half)
    assert rep.max_sigma_residual <= 1e-18
    assert rep.max_lesser_p3_residual <= 1e-18
    assert rep.max_okamoto_residual <= 1e-18
    assert rep.max_identity_residual <= 1e-17
    assert rep.grid_range[0] == sol_half.s0


def test_okamoto_form_with_the_other_shift_fails(sol_half):
    # the shift HH = H(2x) - alpha^2/4 does not satisfy the normal form
    al = M.mpf(0.5)
    s = sol_half.grid[len(sol_half.grid) // 2]
    C, Cp, _, _ = sol_half.state_at(s)
    H, H1, H2 = hcal_derivatives(s, C, Cp, al)
    good = painleve.okamoto_residual(s, H, H1, H2, al)
    bad = painleve.okamoto_residual(s, H - al ** 2 / 2, H1, H2, al)
    assert good <= 1e-18
    assert bad >= 1e-3


def test_tolerance_controls_the_error():
    loose = solve_c(HALF, 20, 1e-12, CTX)
    tight = solve_c(HALF, 20, 1e-24, CTX)
    d = abs(loose.delta(20) - tight.delta(20))
    assert 0 < d <= 1e-9
    assert len(tight.grid) > len(loose.grid)


@pytest.mark.parametrize("alpha", [HALF, Fr(3, 2), Fr(7, 2)])
def test_c_stays_positive(alpha):
    sol = cached_solution(alpha, 50, CTX)
    assert all(c > 0 for c in sol.C)


@pytest.mark.parametrize("alpha", [Fr(1, 3), Fr(5, 2)])
def test_hcal_over_s_near_origin(alpha):
    # H(s)/s -> -1/(2 alpha), with a correction of relative size s^min(alpha, 1)
    sol = cached_solution(alpha, 50, CTX)
    al = M.mpf(alpha.numerator) / alpha.denominator
    s = M.mpf("1e-6")
    assert abs(sol.hcal(s) / s + 1 / (2 * al)) <= 10 * s ** min(al, 1)


def test_hcal_derivative_is_minus_half_c(sol_half):
    al = M.mpf(0.5)
    for s in (sol_half.grid[5], M.mpf(30)):
        C, Cp, _, _ = sol_half.state_at(s)
        _, H1, _ = hcal_derivatives(M.mpf(s), C, Cp, al)
        assert abs(H1 + C / 2) <= 1e-60


def test_csv_has_header_and_rows():
    sol = solve_c(HALF, 2, 1e-12, CTX)
    text = sol.to_csv(20)
    lines = text.splitlines()
    assert lines[0].startswith("# {") and '"alpha": "1/2"' in lines[0]
    assert lines[1] == "s,C,Cp,lnDelta,Hcal"
    assert len(lines) == 2 + len(sol.grid)


def test_solver_refusals():
    with pytest.raises(SeriesError):
        solve_c(2, 10, 1e-12, CTX)
    with pytest.raises(DomainError):
        solve_c(Fr(-1, 2), 10, 1e-12, CTX)
    with pytest.raises(DomainError):
        solve_c(HALF, "1e-5", 1e-12, CTX)
    sol = solve_c(HALF, 1, 1e-12, CTX)
    with pytest.raises(DomainError):
        sol.state_at(2)
    with pytest.raises(DomainError):
        painleve.fit_constant_c1(HALF, [10, 20], CTX)
