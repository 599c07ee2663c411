"""Independent numerical checks of the closed-form orbits.

The second-order equation is integrated as the first-order system
``x' = v``, ``v' = tan x (1 - v)(2v - 1)``.  Unbounded orbits pass through
``cos x = 0`` with ``v = 1``, where the field is 0 * inf; inside a thin band
``|cos x| < REGULARIZATION_EPS`` the factor ``(1 - v) / cos x`` is replaced by
its value on the energy level, ``s * sqrt((2v - 1) / c)``, which is finite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import constants as K
from . import integrator
from .closed_form import (
    InitialData,
    OrbitClass,
    OrbitParams,
    crossing_times,
    derive_params,
    velocity_extreme_times,
    x_closed,
    xdot_closed,
)
from .companion import companion_rhs
from .energy import energy_residual
from .errors import DomainError, InvalidLevel, NotApplicable, SingularPosition, TooCloseToCrossing
from .series import TimeSeries, merge_samples


@dataclass(frozen=True)
class EquilibriumReport:
    point: tuple[float, float]
    eigenvalues: tuple[complex, complex]
    classification: str
    jacobian: np.ndarray


def rhs(x: float, v: float) -> float:
    cx = math.cos(x)
    if cx == 0.0:
        raise SingularPosition("acceleration is singular where cos x = 0")
    return math.sin(x) / cx * (1.0 - v) * (2.0 * v - 1.0)


def orbit_sign(x0: float, b: float) -> float:
    """Constant sign of ``(1 - v) / cos x`` along the orbit through ``(x0, b)``."""
    return math.copysign(1.0, (1.0 - b) * math.cos(x0))


def rhs_regularized(x: float, v: float, c: float, sign: float = 1.0,
                    eps: float = K.REGULARIZATION_EPS) -> float:
    """Acceleration on an unbounded orbit of level ``c > 0``, finite at ``(odd pi/2, 1)``.

    ``sign`` is :func:`orbit_sign` of the orbit; it is +1 for ``1/2 < b < 1``
    and -1 for ``b > 1`` (with ``cos x0 > 0``).
    """
    if not c > 0.0:
        raise InvalidLevel(f"regularized field needs an unbounded level c > 0, got {c!r}")
    cx = math.cos(x)
    if abs(cx) >= eps:
        return math.sin(x) / cx * (1.0 - v) * (2.0 * v - 1.0)
    w = max(2.0 * v - 1.0, 0.0)
    return sign * math.sin(x) * math.sqrt(w / c) * w


def _state_field(accel):
    def f(t, y):
        return np.array([y[1], accel(y[0], y[1])])
    return f


def _check_tol(t0: float, t1: float, tol: float) -> None:
    if not t0 < t1:
        raise DomainError(f"need t0 < t1, got [{t0!r}, {t1!r}]")
    if not K.MIN_INTEGRATOR_TOL <= tol <= K.MAX_INTEGRATOR_TOL:
        raise DomainError(
            f"tol must lie in [{K.MIN_INTEGRATOR_TOL}, {K.MAX_INTEGRATOR_TOL}], got {tol!r}"
        )


def snap_to_interface(x: float) -> float:
    """Nearest odd multiple of pi/2."""
    return K.HALF_PI + math.pi * round((x - K.HALF_PI) / math.pi)


def integrate(init: InitialData, t0: float = 0.0, t1: float = 10.0,
              tol: float = K.DEFAULT_INTEGRATOR_TOL) -> TimeSeries:
    """Integrate from the state ``(init.x0, init.b)`` at time ``t0`` to ``t1``."""
    _check_tol(t0, t1, tol)
    p = derive_params(init)
    x0, b, c = init.x0, init.b, p.c
    meta = {"source": "integrator", "tol": tol, "events": []}

    if p.klass is OrbitClass.EQUILIBRIUM:
        t = np.array([t0, t1])
        x = np.full(2, x0)
        v = np.zeros(2)
        return TimeSeries(t, x, v, energy_residual(x, v, c), meta)

    if p.klass is OrbitClass.UNBOUNDED:
        sgn = orbit_sign(x0, b)
        field = _state_field(lambda x, v: rhs_regularized(x, v, c, sgn))
        events = {"crossing": lambda t, y: y[..., 1] - 1.0}
    elif p.klass is OrbitClass.PERIODIC:
        field = _state_field(rhs)
        events = {"turning": lambda t, y: y[..., 1]}
    else:
        field = _state_field(rhs)
        events = {}

    traj = integrator.integrate(field, t0, t1, [x0, b], tol, events=events)
    ev_t, ev_y = [], []
    for ev in traj.events:
        meta["events"].append({"kind": ev.name, "t": ev.t, "x": float(ev.y[0]), "v": float(ev.y[1])})
        if ev.name == "crossing":
            ev_y.append((snap_to_interface(ev.y[0]), 1.0))
        else:
            ev_y.append((ev.y[0], 0.0))
        ev_t.append(ev.t)
    meta["steps"] = traj.n_steps
    meta["rejected"] = traj.n_rejected
    meta["dense_capped"] = traj.capped
    t, y = merge_samples(traj.t, traj.y, ev_t, ev_y, min_gap=K.EVENT_T_TOL)
    x, v = y[:, 0], y[:, 1]
    return TimeSeries(t, x, v, energy_residual(x, v, c), meta)


def _nearest_crossing_distance(p: OrbitParams, t: float) -> float:
    j0 = 2 * math.floor(t / K.TWO_PI) - 2
    return min(abs(t - tj) for tj in crossing_times(p, j0, j0 + 7))


def fd_equation_residual(p: OrbitParams, t: float, h: float) -> float:
    """``|d/dt[cos x / (1 - x')] + sin x|`` by central differences along the closed form."""
    if p.klass is OrbitClass.EQUILIBRIUM:
        raise NotApplicable("no time dependence at an equilibrium")
    if not 1e-7 <= h <= 1e-3:
        raise DomainError(f"h must lie in [1e-7, 1e-3], got {h!r}")
    if p.klass is OrbitClass.UNBOUNDED:
        d = _nearest_crossing_distance(p, t)
        if d < 3.0 * h:
            raise TooCloseToCrossing(f"t={t!r} is {d:.3g} from a crossing; stencil needs >= {3 * h:.3g}")

    def F(s):
        return math.cos(x_closed(p, s)) / (1.0 - xdot_closed(p, s))

    return abs((F(t + h) - F(t - h)) / (2.0 * h) + math.sin(x_closed(p, t)))


def mean_xdot_quadrature(p: OrbitParams) -> float:
    """Average of the closed-form velocity over one period.

    The integrand is smooth and 2 pi-periodic, so the trapezoidal rule
    converges geometrically; points are doubled until two levels agree.
    Sharply peaked velocities (level close to 0) that do not settle within
    2^16 points go to adaptive Gauss-Kronrod with the extrema as breakpoints.
    """
    if p.klass not in (OrbitClass.PERIODIC, OrbitClass.UNBOUNDED):
        raise NotApplicable(f"mean velocity quadrature needs a periodic velocity, got {p.klass.value}")
    n = 64
    prev = None
    while n <= 1 << 16:
        t = np.arange(n) * (K.TWO_PI / n)
        mean = float(np.mean(xdot_closed(p, t)))
        if prev is not None and abs(mean - prev) <= 0.01 * K.QUADRATURE_TOL:
            return mean
        prev = mean
        n *= 2
    breaks = [t for t in velocity_extreme_times(p, 0.0, K.TWO_PI) if 0.0 < t < K.TWO_PI]
    with warnings.catch_warnings():
        # roundoff warnings just mean the peak itself is ill-conditioned
        warnings.simplefilter("ignore", IntegrationWarning)
        total, _ = quad(lambda s: xdot_closed(p, s), 0.0, K.TWO_PI, points=breaks or None,
                        limit=1000, epsabs=1e-3 * K.QUADRATURE_TOL, epsrel=0.0)
    return total / K.TWO_PI


def main_field(x: float, v: float) -> tuple[float, float]:
    return v, rhs(x, v)


def companion_field(x: float, v: float) -> tuple[float, float]:
    return v, companion_rhs(x, v)


def jacobian_fd(field, x: float, v: float, h: float = K.JACOBIAN_STEP) -> np.ndarray:
    J = np.empty((2, 2))
    for j, (dx, dv) in enumerate(((h, 0.0), (0.0, h))):
        fp = field(x + dx, v + dv)
        fm = field(x - dx, v - dv)
        J[:, j] = [(fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)]
    return J


def classify(eigenvalues, tol: float = K.LINEARIZATION_TOL) -> str:
    ev = np.asarray(eigenvalues, dtype=complex)
    re, im = ev.real, ev.imag
    if np.all(np.abs(im) <= tol):
        lo, hi = float(np.min(re)), float(np.max(re))
        if lo < -tol and hi > tol:
            return "saddle"
        if hi < -tol:
            return "stable node"
        if lo > tol:
            return "unstable node"
        return "degenerate"
    if np.all(np.abs(re) <= tol):
        return "center"
    return "stable focus" if np.all(re < 0) else "unstable focus"


def linearize(n: int, which: str = "main") -> EquilibriumReport:
    """Linearization at ``(n pi, 0)`` from a finite-difference Jacobian.

    The main equation gives ``y'' = -y`` (center, eigenvalues +-i); the
    companion equation gives ``y'' = y`` (saddle, eigenvalues +-1).
    """
    fields = {"main": main_field, "companion": companion_field}
    if which not in fields:
        raise DomainError(f"which must be 'main' or 'companion', got {which!r}")
    point = (n * math.pi, 0.0)
    J = jacobian_fd(fields[which], *point)
    eig = np.linalg.eigvals(J)
    eig = tuple(sorted((complex(e) for e in eig), key=lambda z: (z.real, z.imag)))
    return EquilibriumReport(point, eig, classify(eig), J)
