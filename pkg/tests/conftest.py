from fractions import Fraction

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from perturbed_laguerre.precision import PrecisionCtx

settings.register_profile(
    "numeric", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")

HALF = Fraction(1, 2)


@pytest.fixture(scope="session")
def ctx():
    return PrecisionCtx(256)


@pytest.fixture(scope="session")
def M(ctx):
    return ctx.mp


def close(x, y, tol):
    """|x - y| <= tol, with the numbers shown on failure."""
    diff = abs(mpmath.mpf(x) - mpmath.mpf(y))
    assert diff <= tol, f"{mpmath.nstr(x, 20)} vs {mpmath.nstr(y, 20)}: diff {mpmath.nstr(diff, 5)} > {tol}"


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
