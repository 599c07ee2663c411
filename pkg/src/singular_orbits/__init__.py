"""Explicit orbits of the singular equation d/dt(cos x / (1 - x')) = -sin x.

The closed-form solution is in :mod:`closed_form`, with its energy integral
in :mod:`energy`. :mod:`numeric` provides an independent integrator oracle
and the finite-difference checks. :mod:`companion` treats the ``+sin x``
equation, and :mod:`portrait_io` writes CSV series and SVG portraits.
"""

from .closed_form import (
    InitialData,
    OrbitClass,
    OrbitParams,
    PeriodInfo,
    X_tan,
    crossing_times,
    derive_params,
    normalize_initial,
    orbit_params,
    period_info,
    psi,
    turning_times,
    velocity_denominator,
    velocity_extreme_times,
    x_closed,
    xdot_closed,
    xi_family_params,
    xi_family_xdot,
)
from .companion import (
    CompanionLevel,
    LevelCurve,
    companion_integrate,
    companion_level,
    companion_rhs,
    solve_branch,
    trace_level,
)
from .energy import EnergyLevel, energy_residual, energy_value, level_bounds, xdot_branches
from .errors import DomainError, SinkError, StepFailure
from .numeric import (
    EquilibriumReport,
    fd_equation_residual,
    integrate,
    linearize,
    mean_xdot_quadrature,
    rhs,
    rhs_regularized,
)
from .series import TimeSeries

__version__ = "0.1.0"
