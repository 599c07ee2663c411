"""Phase-plane analysis of  d/dt(cos x / (1 - x')) = +sin x.

Expanding the derivative gives ``v' = tan x (1 - v)``, and orbits lie on the
levels ``(1 - v) e^v = c cos x``.  There is no explicit solution, so orbits
are traced as level curves by inverting ``f(v) = (1 - v) e^v`` branch-wise,
and integrated numerically as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import constants as K
from . import integrator
from .errors import DomainError, EmptyCurve, InvalidLevel, OutOfRange, SingularPosition
from .series import TimeSeries, merge_samples

LOWER = "lower"
UPPER = "upper"


@dataclass(frozen=True)
class CompanionLevel:
    c: float

    @property
    def degenerate(self) -> bool:
        return self.c == 0.0

    def cell_components(self, k: int) -> list[tuple[float, float, bool, bool]]:
        """Parts of the cell around ``k pi`` where ``c cos x`` lies in (0, 1].

        Each part is ``(lo, hi, lo_closed, hi_closed)``. When ``|c| <= 1`` it
        is the whole open cell; otherwise the middle, where ``c cos x > 1``,
        is cut out and two parts remain, closed at the inner edge. Empty when
        ``c cos x <= 0`` on the cell.
        """
        cy = self.c * (1.0 if k % 2 == 0 else -1.0)
        if cy <= 0.0:
            return []
        centre = k * math.pi
        if cy <= 1.0:
            return [(centre - K.HALF_PI, centre + K.HALF_PI, False, False)]
        half = math.acos(1.0 / cy)
        return [(centre - K.HALF_PI, centre - half, False, True),
                (centre + half, centre + K.HALF_PI, True, False)]


@dataclass
class LevelCurve:
    x: np.ndarray
    v: np.ndarray
    branch: np.ndarray
    level: CompanionLevel

    def points(self) -> list[tuple[float, float, str]]:
        return list(zip(self.x.tolist(), self.v.tolist(), self.branch.tolist()))


def level_function(v):
    """``f(v) = (1 - v) e^v``; maximum 1 at v = 0."""
    return (1.0 - v) * np.exp(v)


def companion_level(a: float, b: float) -> CompanionLevel:
    ca = math.cos(a)
    if abs(ca) <= 4.0 * np.finfo(float).eps * max(1.0, abs(a)):
        raise SingularPosition(f"cos a = 0 at a = {a!r}: level undefined")
    return CompanionLevel((1.0 - b) * math.exp(b) / ca)


def solve_branch(y: float, branch: str) -> float:
    """Solve ``(1 - v) e^v = y`` on the lower (v <= 0) or upper (v >= 0) branch.

    Bisection on a doubling bracket to 1e-8, then at most five Newton steps.
    """
    if branch not in (LOWER, UPPER):
        raise DomainError(f"branch must be 'lower' or 'upper', got {branch!r}")
    if not math.isfinite(y) or y > 1.0 or (branch == LOWER and y <= 0.0):
        domain = "(0, 1]" if branch == LOWER else "(-inf, 1]"
        raise OutOfRange(f"{branch} branch needs y in {domain}, got {y!r}")
    if y == 1.0:
        return 0.0

    def f(v):
        return (1.0 - v) * math.exp(v)

    # f is increasing on the lower branch and decreasing on the upper one
    if branch == LOWER:
        lo, hi = -1.0, 0.0
        while f(lo) >= y:
            lo *= 2.0
    else:
        lo, hi = 0.0, 1.0
        while f(hi) >= y:
            hi *= 2.0
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        if (f(mid) < y) == (branch == LOWER):
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    for _ in range(5):
        d = -v * math.exp(v)
        if d == 0.0:
            break
        step = (f(v) - y) / d
        v_new = min(max(v - step, lo), hi)
        if v_new == v:
            break
        v = v_new
    return v


def companion_rhs(x: float, v: float) -> float:
    cx = math.cos(x)
    if cx == 0.0:
        raise SingularPosition("companion acceleration is singular where cos x = 0")
    return math.sin(x) / cx * (1.0 - v)


def companion_rhs_regularized(x: float, v: float, c: float,
                              eps: float = K.REGULARIZATION_EPS) -> float:
    """Companion field with ``(1 - v) / cos x`` replaced by ``c e^{-v}`` near cos x = 0."""
    cx = math.cos(x)
    if abs(cx) >= eps:
        return math.sin(x) / cx * (1.0 - v)
    return c * math.sin(x) * math.exp(-v)


def _cell_samples(lo: float, hi: float, lo_closed: bool, hi_closed: bool, n: int) -> np.ndarray:
    # open ends sit on cos x = 0 and are dropped
    x = np.linspace(lo, hi, n + 2 - lo_closed - hi_closed)
    return x[(0 if lo_closed else 1):(len(x) if hi_closed else len(x) - 1)]


def trace_level(level: CompanionLevel, n: int, cells: Iterable[int] = (0,),
                include_negative: bool = False) -> LevelCurve:
    """Sample the level curve with ``n`` points per branch per component.

    Components are the parts of the cells ``(k pi - pi/2, k pi + pi/2)``
    where ``c cos x`` lies in (0, 1] (see :meth:`CompanionLevel.cell_components`);
    both branches are solved there and join at ``v = 0`` on closed edges. With ``include_negative``
    the cells where ``c cos x <= 0`` also contribute their single upper
    branch (``v >= 1``). The degenerate level ``c = 0`` is the invariant
    line ``v = 1``.
    """
    if n < 2:
        raise DomainError(f"need n >= 2 points per branch, got {n!r}")
    if not math.isfinite(level.c):
        raise InvalidLevel(f"level must be finite, got {level.c!r}")
    xs, vs, brs = [], [], []
    for k in cells:
        comps = level.cell_components(k)
        for lo, hi, lo_closed, hi_closed in comps:
            x = _cell_samples(lo, hi, lo_closed, hi_closed, n)
            y = np.minimum(level.c * np.cos(x), 1.0)
            # closed edges are where c cos x = 1 exactly; the branches meet at v = 0
            if lo_closed:
                y[0] = 1.0
            if hi_closed:
                y[-1] = 1.0
            for br in (LOWER, UPPER):
                xs.append(x)
                vs.append(np.array([solve_branch(float(yi), br) for yi in y]))
                brs.append(np.full(n, br))
        if not comps and (level.degenerate or include_negative):
            centre = k * math.pi
            x = _cell_samples(centre - K.HALF_PI, centre + K.HALF_PI, False, False, n)
            y = np.minimum(level.c * np.cos(x), 0.0)
            xs.append(x)
            vs.append(np.array([solve_branch(float(yi), UPPER) for yi in y]))
            brs.append(np.full(n, UPPER))
    if not xs:
        raise EmptyCurve(f"no point of level c={level.c!r} lies in cells {list(cells)!r}")
    return LevelCurve(np.concatenate(xs), np.concatenate(vs), np.concatenate(brs), level)


def companion_integrate(a: float, b: float, t0: float = 0.0, t1: float = 10.0,
                        tol: float = K.DEFAULT_INTEGRATOR_TOL) -> TimeSeries:
    """Integrate the companion equation from ``(a, b)`` at ``t0``.

    The residual column is the level drift ``(1 - v) e^v - c cos x``.
    """
    if not t0 < t1:
        raise DomainError(f"need t0 < t1, got [{t0!r}, {t1!r}]")
    if not K.MIN_INTEGRATOR_TOL <= tol <= K.MAX_INTEGRATOR_TOL:
        raise DomainError(f"tol must lie in [{K.MIN_INTEGRATOR_TOL}, {K.MAX_INTEGRATOR_TOL}], got {tol!r}")
    c = companion_level(a, b).c

    def field(t, y):
        return np.array([y[1], companion_rhs_regularized(y[0], y[1], c)])

    events = {"crossing": lambda t, y: y[..., 1] - 1.0, "turning": lambda t, y: y[..., 1]}
    traj = integrator.integrate(field, t0, t1, [a, b], tol, events=events)
    meta = {"source": "companion_integrator", "tol": tol, "level": c, "events": [],
            "steps": traj.n_steps, "rejected": traj.n_rejected, "dense_capped": traj.capped}
    ev_t, ev_y = [], []
    for ev in traj.events:
        meta["events"].append({"kind": ev.name, "t": ev.t, "x": float(ev.y[0]), "v": float(ev.y[1])})
        ev_t.append(ev.t)
        ev_y.append(tuple(ev.y))
    t, y = merge_samples(traj.t, traj.y, ev_t, ev_y, min_gap=K.EVENT_T_TOL)
    x, v = y[:, 0], y[:, 1]
    return TimeSeries(t, x, v, level_function(v) - c * np.cos(x), meta)
