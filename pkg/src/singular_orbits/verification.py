"""Invariant battery run by ``singular-orbits verify``.

Each check compares one measured quantity with a threshold from
:mod:`singular_orbits.constants`; every threshold is multiplied by
``tol / DEFAULT_INTEGRATOR_TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as K
from .closed_form import (
    OrbitClass,
    OrbitParams,
    crossing_times,
    normalize_initial,
    derive_params,
    x_closed,
    xdot_closed,
)
from .energy import energy_residual
from .errors import StepFailure
from .numeric import fd_equation_residual, integrate, mean_xdot_quadrature

FD_ORDER_STEPS = (1e-3, 5e-4, 2.5e-4, 1.25e-4)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""


def _check(name: str, value: float, threshold: float, detail: str = "") -> CheckResult:
    return CheckResult(name, float(value), float(threshold), bool(value <= threshold), detail)


def _fd_points(p: OrbitParams, count: int = 8) -> list[float]:
    """Evenly spread times in (0, 2 pi) kept >= 0.05 away from interface crossings."""
    ts = list(np.linspace(0.3, K.TWO_PI - 0.3, count))
    if p.klass is not OrbitClass.UNBOUNDED:
        return ts
    crossings = crossing_times(p, -2, 5)
    return [t for t in ts if min(abs(t - c) for c in crossings) > 0.05]


def run_battery(a: float, b: float, tol: float = K.DEFAULT_INTEGRATOR_TOL) -> list[CheckResult]:
    init = normalize_initial(a, b)
    p = derive_params(init)
    scale = tol / K.DEFAULT_INTEGRATOR_TOL
    out: list[CheckResult] = []

    if p.klass is OrbitClass.EQUILIBRIUM:
        ts = integrate(init, 0.0, 10.0, tol)
        out.append(_check("equilibrium stays fixed", np.max(np.abs(ts.x - init.x0)) + np.max(np.abs(ts.v)),
                          K.ORACLE_SUP_TOL * scale))
        return out

    ident = abs(p.A ** 2 + p.B ** 2 - 4.0 * (1.0 - p.b) ** 2 * (1.0 + p.c)) / max(1.0, p.A ** 2 + p.B ** 2)
    out.append(_check("identity A^2+B^2 = 4(1-b)^2(1+c)", ident, K.IDENTITY_REL_TOL * scale))

    t = np.linspace(0.0, 2 * K.TWO_PI, 2000)
    x = x_closed(p, t)
    v = xdot_closed(p, t)
    out.append(_check("closed-form energy residual", np.max(np.abs(energy_residual(x, v, p.c))),
                      K.ENERGY_RESIDUAL_TOL * scale))

    if p.klass is OrbitClass.LINE:
        ts = integrate(init, 0.0, 10.0, tol)
        err = np.max(np.abs(ts.x - x_closed(p, ts.t)))
        out.append(_check("integrator vs closed form (sup, [0,10])", err, K.ORACLE_SUP_TOL * scale))
        return out

    drift = 2.0 * math.pi if p.klass is OrbitClass.UNBOUNDED else 0.0
    per = np.max(np.abs(x_closed(p, t + K.TWO_PI) - x - drift))
    out.append(_check("x(t+2pi) - x(t) in {0, 2pi}", per, K.PERIODICITY_TOL * scale))

    # one Richardson step keeps sharply peaked orbits (c near 0) within tolerance
    h = K.FD_DERIVATIVE_STEP
    tt = np.array(_fd_points(p, 16))

    def central(step):
        return (x_closed(p, tt + step) - x_closed(p, tt - step)) / (2 * step)

    fd = (4.0 * central(0.5 * h) - central(h)) / 3.0
    out.append(_check("d/dt x_closed = xdot_closed (FD)", np.max(np.abs(fd - xdot_closed(p, tt))),
                      K.FD_DERIVATIVE_TOL * scale))

    if p.klass is OrbitClass.UNBOUNDED:
        tj = crossing_times(p, 0, 5)
        xj = np.asarray(x_closed(p, tj))
        off = np.abs(np.mod(xj - K.HALF_PI + 0.5 * math.pi, math.pi) - 0.5 * math.pi)
        vj = np.abs(np.asarray(xdot_closed(p, tj)) - 1.0)
        out.append(_check("crossings: x = odd pi/2, x' = 1", max(off.max(), vj.max()),
                          K.CROSSING_VALUE_TOL * scale))

    mean = mean_xdot_quadrature(p)
    target = 1.0 if p.klass is OrbitClass.UNBOUNDED else 0.0
    out.append(_check("mean velocity (quadrature) in {0, 1}", abs(mean - target),
                      K.MEAN_VELOCITY_TOL * scale, f"mean={mean:.12g}"))

    fd_pts = _fd_points(p)
    worst = max(fd_equation_residual(p, s, K.FD_EQUATION_STEP) for s in fd_pts)
    out.append(_check("equation residual (central FD, h=1e-4)", worst, K.FD_EQUATION_TOL * scale))

    ratios = []
    for s in fd_pts[:3]:
        r = [fd_equation_residual(p, s, hh) for hh in FD_ORDER_STEPS]
        ratios += [r[i] / r[i + 1] for i in range(len(r) - 1)]
    lo, hi = K.FD_ORDER_RATIO
    bad = max(max(lo - q, q - hi, 0.0) for q in ratios)
    out.append(_check("equation residual is O(h^2)", bad, 0.0,
                      "ratios=" + ",".join(f"{q:.2f}" for q in ratios)))

    try:
        long = integrate(init, 0.0, 20.0, tol)
    except StepFailure as exc:
        out.append(CheckResult("integrator run ([0,20])", math.inf, 0.0, False, str(exc)))
        return out
    head = long.t <= 10.0
    err = np.max(np.abs(long.x[head] - x_closed(p, long.t[head])))
    n_ev = sum(1 for e in long.meta["events"] if e["t"] <= 10.0)
    out.append(_check("integrator vs closed form (sup, [0,10])", err, K.ORACLE_SUP_TOL * scale,
                      f"{n_ev} events"))
    # the residual is a difference of terms of size |c|(1-v)^2; compare it to that size
    size = max(1.0, float(np.max(abs(p.c) * (1.0 - long.v) ** 2)))
    out.append(_check("integrator energy drift, relative ([0,20])",
                      np.max(np.abs(long.residual)) / size, K.ENERGY_DRIFT_TOL * scale))
    return out


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'value':>11}  {'threshold':>11}  result"]
    for r in results:
        verdict = "PASS" if r.passed else "FAIL"
        extra = f"  ({r.detail})" if r.detail else ""
        lines.append(f"{r.name:<{width}}  {r.value:>11.3e}  {r.threshold:>11.3e}  {verdict}{extra}")
    return "\n".join(lines)
