"""Acceptance criteria, each at its stated tolerance.

Every test prints its [PASS]/[FAIL] line and the lines are repeated in the
terminal summary.  Two criteria fail on their merits and are marked as
strict expected failures: if they ever start passing the suite goes red.
"""

import pytest

from perturbed_laguerre.precision import PrecisionCtx
from perturbed_laguerre.verification import CHECKS, run_check

from conftest import ACCEPTANCE_LINES

CTX = PrecisionCtx(256)

EXPECTED_FAILURES = {
    1: "the printed s^5 coefficient of the small-s H table has the opposite sign to the "
       "value implied by the printed C and ln Delta tables; all other coefficients match",
    9: "the integrated ln Delta gives c1(1/2) = -0.27289174, 0.1196 above the Barnes-G "
       "closed form; the finite-n determinants confirm the integrated values",
}


def _params():
    for k in sorted(CHECKS):
        marks = []
        if k in EXPECTED_FAILURES:
            marks.append(pytest.mark.xfail(reason=EXPECTED_FAILURES[k], strict=True))
        yield pytest.param(k, marks=marks, id=f"criterion-{k:02d}")


@pytest.mark.parametrize("number", list(_params()))
def test_criterion(number):
    result = run_check(number, CTX)
    line = result.line()
    print(line)
    for d in result.details:
        print("    " + d)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, line
