"""Shared numerical tolerances.

Every tolerance used by the checks and the verification battery lives here,
so that a single ``--tol`` scale factor can be applied uniformly.
"""

import math

PI = math.pi
HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi

# closed-form contracts
IDENTITY_REL_TOL = 1e-12
PSI_POLE_WINDOW = 1e-12
TAN_CONSISTENCY_REL_TOL = 1e-8
TAN_CONSISTENCY_MIN_COS = 1e-6
FD_DERIVATIVE_STEP = 1e-5
FD_DERIVATIVE_TOL = 1e-8
FD_DERIVATIVE_TOL_AT_CROSSING = 1e-6
PERIODICITY_TOL = 1e-10
SYMMETRY_TOL = 1e-10
CROSSING_VALUE_TOL = 1e-9
CROSSING_T0_TOL = 1e-12

# energy
ENERGY_RESIDUAL_TOL = 1e-9
BRANCH_TOL = 1e-8
RANGE_TOL = 1e-10
TURNING_RADICAND_TOL = 1e-12

# numeric oracle
DEFAULT_INTEGRATOR_TOL = 1e-10
MIN_INTEGRATOR_TOL = 1e-13
MAX_INTEGRATOR_TOL = 1e-3
REGULARIZATION_EPS = 1e-3
EVENT_T_TOL = 1e-12
ORACLE_SUP_TOL = 1e-6
ENERGY_DRIFT_TOL = 1e-7
FD_EQUATION_TOL = 1e-6
FD_EQUATION_STEP = 1e-4
FD_ORDER_RATIO = (3.5, 4.5)
MEAN_VELOCITY_TOL = 1e-8
QUADRATURE_TOL = 1e-10
LINEARIZATION_TOL = 1e-6
JACOBIAN_STEP = 1e-6

# companion
BRANCH_SOLVE_TOL = 1e-12
COMPANION_DRIFT_TOL = 1e-7
LEVEL_CURVE_TOL = 1e-10

# portrait
PORTRAIT_EXTREME_TOL = 1e-9
PORTRAIT_CROSSING_X_TOL = 1e-6
