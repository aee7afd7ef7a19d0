"""Extended-precision toolkit for the weight x^alpha exp(-x - t/x) on (0, inf).

Finite-n Hankel determinants and recurrence coefficients, exact series of
the double-scaled C potential and ln Delta, an integrator for the regular
Painleve III branch, the Coulomb-fluid equilibrium measure, and large-n
asymptotics of P_n(0).
"""

from .errors import (
    ConsistencyError,
    DomainError,
    FitQualityError,
    LaguerreLabError,
    PrecisionError,
    QuadratureError,
    SeriesError,
    SingularityError,
)
from .precision import DEFAULT_CTX, PrecisionCtx, to_mpf
from .special_functions import barnes_g_log, bessel_k, log_gamma, zeta_int
from .hankel import (
    WeightParams,
    finite_n_diagnostics,
    hankel_det,
    moment,
    moment_oracle,
    moments,
    pn_at_zero,
    recurrence_coeffs,
    scaled_ratio,
    y_n,
)
from .series import (
    PuiseuxSeries,
    c_large_series,
    c_small_series,
    ctilde_series,
    delta_log_large_series,
    delta_log_small_series,
    eval_series,
    h_large_series,
    h_small_series,
    ratio_expansion,
)
from .painleve import OdeSolution, delta, fit_constant_c1, hcal, solve_c, verify_residuals
from .coulomb_fluid import FluidEndpoints, cubic_limit_root, density, solve_endpoints, verify_appendix_integrals
from .asymptotics import c1_conjectured, c2_constant, pn0_ratio_check, s1_at_zero, s2_at_zero

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "DomainError",
    "FitQualityError",
    "LaguerreLabError",
    "PrecisionError",
    "QuadratureError",
    "SeriesError",
    "SingularityError",
    "DEFAULT_CTX",
    "PrecisionCtx",
    "to_mpf",
    "barnes_g_log",
    "bessel_k",
    "log_gamma",
    "zeta_int",
    "WeightParams",
    "finite_n_diagnostics",
    "hankel_det",
    "moment",
    "moment_oracle",
    "moments",
    "pn_at_zero",
    "recurrence_coeffs",
    "scaled_ratio",
    "y_n",
    "PuiseuxSeries",
    "c_large_series",
    "c_small_series",
    "ctilde_series",
    "delta_log_large_series",
    "delta_log_small_series",
    "eval_series",
    "h_large_series",
    "h_small_series",
    "ratio_expansion",
    "OdeSolution",
    "delta",
    "fit_constant_c1",
    "hcal",
    "solve_c",
    "verify_residuals",
    "FluidEndpoints",
    "cubic_limit_root",
    "density",
    "solve_endpoints",
    "verify_appendix_integrals",
    "c1_conjectured",
    "c2_constant",
    "pn0_ratio_check",
    "s1_at_zero",
    "s2_at_zero",
]
