"""Explicit orbits of  d/dt(cos x / (1 - x')) = -sin x.

Every admissible initial pair ``(a, b)`` is reduced to ``|a| < pi/2`` by the
pi-translation symmetry and then evaluated in closed form:

* velocity   x'(t) = 1/2 + 2(2b-1)cos^2 a / D(t),
  D(t) = A^2 + B^2 + 4(1-b)(B cos t - A sin t) + 4(1-b)^2,
* tangent    tan x(t) = (A cos t + B sin t) / (2(1-b) + B cos t - A sin t),
* position   x(t) = a + t/2 + sign(2b-1) (psi(t) - psi(0)),

with ``A = sin 2a`` and ``B = 2b - 1 + cos 2a``.  All evaluators accept
scalars or numpy arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import constants as K
from .errors import DomainError, ForbiddenVelocity, InvalidXi, NotApplicable, SingularPosition

ArrayLike = Union[float, np.ndarray]


class OrbitClass(enum.Enum):
    EQUILIBRIUM = "equilibrium"
    LINE = "line"
    PERIODIC = "periodic"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class InitialData:
    """Initial pair with ``|a| < pi/2``; the raw position was ``a + shift_n * pi``."""

    a: float
    b: float
    shift_n: int = 0

    @property
    def x0(self) -> float:
        return self.a + self.shift_n * math.pi


@dataclass(frozen=True)
class OrbitParams:
    init: InitialData
    A: float
    B: float
    c: float
    R: float
    phi: float
    branch: int
    klass: OrbitClass

    @property
    def a(self) -> float:
        return self.init.a

    @property
    def b(self) -> float:
        return self.init.b

    @property
    def shift(self) -> float:
        return self.init.shift_n * math.pi

    @property
    def equilibrium_index(self) -> int | None:
        """The integer n of the equilibrium (n pi, 0), or None."""
        if self.klass is OrbitClass.EQUILIBRIUM:
            return self.init.shift_n
        return None


@dataclass(frozen=True)
class PeriodInfo:
    velocity_period: float
    mean_velocity: float
    position_periodic: bool


def normalize_initial(a_raw: float, b: float) -> InitialData:
    """Translate ``a_raw`` by a multiple of pi into ``(-pi/2, pi/2)``.

    Raises
    ------
    SingularPosition
        If ``a_raw`` is an odd multiple of pi/2 (to machine precision).
    ForbiddenVelocity
        If ``b == 1``.
    """
    a_raw = float(a_raw)
    b = float(b)
    if not (math.isfinite(a_raw) and math.isfinite(b)):
        raise DomainError(f"initial data must be finite, got a={a_raw!r}, b={b!r}")
    if b == 1.0:
        raise ForbiddenVelocity("b = 1 forbidden: coefficient of x'' unbounded (condition b != 1)")
    a = math.remainder(a_raw, math.pi)
    n = int(round((a_raw - a) / math.pi))
    if abs(abs(a) - K.HALF_PI) <= 4.0 * np.finfo(float).eps * max(1.0, abs(a_raw)):
        raise SingularPosition(
            f"a = {a_raw!r} is an odd multiple of pi/2: coefficient of x'' vanishes (condition |a| < pi/2)"
        )
    return InitialData(a=a, b=b, shift_n=n)


def derive_params(init: InitialData) -> OrbitParams:
    a, b = init.a, init.b
    if b == 1.0:
        raise ForbiddenVelocity("b = 1 forbidden: coefficient of x'' unbounded (condition b != 1)")
    if abs(a) >= K.HALF_PI:
        raise SingularPosition(f"|a| = {abs(a)!r} is not below pi/2; normalize first")
    A = math.sin(2.0 * a)
    B = 2.0 * b - 1.0 + math.cos(2.0 * a)
    cos2 = math.cos(a) ** 2
    if a == 0.0 and b == 0.0:
        return OrbitParams(init, 0.0, 0.0, -1.0, 0.0, 0.0, 0, OrbitClass.EQUILIBRIUM)
    c = (2.0 * b - 1.0) * cos2 / (1.0 - b) ** 2
    R = math.hypot(A, B)
    phi = math.atan2(A, B)
    if b == 0.5:
        return OrbitParams(init, A, B, 0.0, R, phi, 0, OrbitClass.LINE)
    if b < 0.5:
        return OrbitParams(init, A, B, c, R, phi, -1, OrbitClass.PERIODIC)
    return OrbitParams(init, A, B, c, R, phi, 1, OrbitClass.UNBOUNDED)


def orbit_params(a_raw: float, b: float) -> OrbitParams:
    """Normalize and derive in one call."""
    return derive_params(normalize_initial(a_raw, b))


def _require(p: OrbitParams, *allowed: OrbitClass) -> None:
    if p.klass not in allowed:
        names = ", ".join(k.value for k in allowed)
        raise NotApplicable(f"operation needs orbit class in {{{names}}}, got {p.klass.value}")


def _out(values):
    return float(values) if np.ndim(values) == 0 else values


def velocity_denominator(p: OrbitParams, t: ArrayLike) -> ArrayLike:
    """D(t), computed as the sum of squares (A cos t + B sin t)^2 + (2(1-b) + B cos t - A sin t)^2."""
    t = np.asarray(t, dtype=float)
    ct, st = np.cos(t), np.sin(t)
    num = p.A * ct + p.B * st
    den = 2.0 * (1.0 - p.b) + p.B * ct - p.A * st
    return _out(num * num + den * den)


def xdot_closed(p: OrbitParams, t: ArrayLike) -> ArrayLike:
    if p.klass is OrbitClass.LINE:
        return _out(np.full(np.shape(t), 0.5))
    _require(p, OrbitClass.PERIODIC, OrbitClass.UNBOUNDED)
    t = np.asarray(t, dtype=float)
    b = p.b
    one_b = 1.0 - b
    D = (p.A * p.A + p.B * p.B + 4.0 * one_b * (p.B * np.cos(t) - p.A * np.sin(t))
         + 4.0 * one_b * one_b)
    return _out(0.5 + 2.0 * (2.0 * b - 1.0) * math.cos(p.a) ** 2 / D)


def _psi_coefficients(p: OrbitParams) -> tuple[float, float, float]:
    one_b = 1.0 - p.b
    slope = p.A * p.A + (p.B - 2.0 * one_b) ** 2
    offset = 4.0 * one_b * p.A
    scale = 4.0 * abs(2.0 * p.b - 1.0) * math.cos(p.a) ** 2
    return slope, offset, scale


def psi(p: OrbitParams, t: ArrayLike) -> ArrayLike:
    """Continuous, increasing antiderivative used by :func:`x_closed`.

    On ``|t| < pi`` it is ``arctan((slope * tan(t/2) - offset) / scale)``;
    at ``t = +-pi`` it takes the limits ``+-pi/2``; elsewhere
    ``psi(t) = n pi + psi(t - 2 n pi)`` with ``n = floor((t + pi) / (2 pi))``.
    """
    _require(p, OrbitClass.PERIODIC, OrbitClass.UNBOUNDED)
    slope, offset, scale = _psi_coefficients(p)
    t = np.asarray(t, dtype=float)
    n = np.floor((t + math.pi) / K.TWO_PI)
    r = t - n * K.TWO_PI
    at_pole = np.abs(np.abs(r) - math.pi) <= K.PSI_POLE_WINDOW
    with np.errstate(over="ignore", invalid="ignore"):
        core = np.arctan((slope * np.tan(0.5 * r) - offset) / scale)
    core = np.where(at_pole, np.copysign(K.HALF_PI, r), core)
    return _out(n * math.pi + core)


def x_closed(p: OrbitParams, t: ArrayLike) -> ArrayLike:
    """Position along the orbit; ``x(0)`` equals the raw initial position."""
    if p.klass is OrbitClass.LINE:
        return _out(p.shift + p.a + 0.5 * np.asarray(t, dtype=float))
    _require(p, OrbitClass.PERIODIC, OrbitClass.UNBOUNDED)
    t = np.asarray(t, dtype=float)
    return _out(p.shift + p.a + 0.5 * t + p.branch * (psi(p, t) - psi(p, 0.0)))


def X_tan(p: OrbitParams, t: ArrayLike) -> ArrayLike:
    """tan x(t) as a rational trigonometric expression.

    ``inf`` marks the point at infinity: a denominator within rounding of
    zero (relative to the size of its terms). The numerator cannot vanish
    there for admissible data.
    """
    _require(p, OrbitClass.PERIODIC, OrbitClass.UNBOUNDED)
    t = np.asarray(t, dtype=float)
    ct, st = np.cos(t), np.sin(t)
    num = p.A * ct + p.B * st
    den = 2.0 * (1.0 - p.b) + p.B * ct - p.A * st
    pole = np.abs(den) <= 8.0 * np.finfo(float).eps * (2.0 * abs(1.0 - p.b) + p.R)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(pole, np.inf, num / np.where(pole, 1.0, den))
    return _out(out)


def _root_base(p: OrbitParams, level: float) -> tuple[float, float]:
    """The two roots of B cos t - A sin t = level in (0, 2 pi], ascending."""
    theta = math.acos(max(-1.0, min(1.0, level / p.R)))
    roots = sorted(((-p.phi + sgn * theta) % K.TWO_PI) or K.TWO_PI for sgn in (1.0, -1.0))
    return roots[0], roots[1]


def _polish(p: OrbitParams, t: float, level: float) -> float:
    g = p.B * math.cos(t) - p.A * math.sin(t) - level
    dg = -p.B * math.sin(t) - p.A * math.cos(t)
    if dg != 0.0:
        t -= g / dg
    return t


def _indexed_roots(p: OrbitParams, level: float, j_min: int, j_max: int) -> list[float]:
    s1, s2 = _root_base(p, level)
    out = []
    for j in range(j_min, j_max + 1):
        m, r = divmod(j, 2)
        out.append(_polish(p, (s1 if r == 0 else s2) + m * K.TWO_PI, level))
    return out


def crossing_times(p: OrbitParams, j_min: int = 0, j_max: int = 0) -> list[float]:
    """Interface crossing times ``t_j`` for ``j_min <= j <= j_max``.

    ``t_0`` is the smallest positive root; the roots come in two families
    per velocity period, so ``t_{2m} = s_1 + 2 pi m`` and
    ``t_{2m+1} = s_2 + 2 pi m`` with ``0 < s_1 < s_2 <= 2 pi``.
    """
    if p.klass is not OrbitClass.UNBOUNDED:
        raise NotApplicable(
            f"crossing times exist only for unbounded orbits (b > 1/2), got {p.klass.value}"
        )
    return _indexed_roots(p, 2.0 * (p.b - 1.0), j_min, j_max)


def turning_times(p: OrbitParams, j_min: int = 0, j_max: int = 0) -> list[float]:
    """Times where a periodic orbit has zero velocity (its extreme positions +-alpha).

    Zero velocity means D(t) = -4(2b-1)cos^2 a, i.e.
    B cos t - A sin t = -2((1-b)^2 + (2b-1)cos^2 a) / (1-b); indexed like
    :func:`crossing_times`.
    """
    if p.klass is not OrbitClass.PERIODIC:
        raise NotApplicable(f"turning points exist only for periodic orbits (b < 1/2), got {p.klass.value}")
    one_b = 1.0 - p.b
    level = -2.0 * (one_b * one_b + (2.0 * p.b - 1.0) * math.cos(p.a) ** 2) / one_b
    return _indexed_roots(p, level, j_min, j_max)


def velocity_extreme_times(p: OrbitParams, t0: float, t1: float) -> list[float]:
    """Times in [t0, t1] where B cos t - A sin t = +-R, i.e. the velocity is extremal."""
    k_lo = math.ceil((t0 + p.phi) / math.pi)
    k_hi = math.floor((t1 + p.phi) / math.pi)
    return [-p.phi + k * math.pi for k in range(k_lo, k_hi + 1)]


def period_info(p: OrbitParams) -> PeriodInfo:
    if p.klass is OrbitClass.EQUILIBRIUM:
        raise NotApplicable("period information is undefined at an equilibrium")
    if p.klass is OrbitClass.LINE:
        return PeriodInfo(K.TWO_PI, 0.5, False)
    if p.klass is OrbitClass.PERIODIC:
        return PeriodInfo(K.TWO_PI, 0.0, True)
    return PeriodInfo(K.TWO_PI, 1.0, False)


def xi_family_params(xi: float) -> OrbitParams:
    """Orbit through ``(0, xi / (xi + 1))``, the one-parameter family with A = 0."""
    xi = float(xi)
    if xi in (0.0, 1.0, -1.0) or not math.isfinite(xi):
        raise InvalidXi(f"xi must be finite and not in {{0, 1, -1}}, got {xi!r}")
    return derive_params(normalize_initial(0.0, xi / (xi + 1.0)))


def xi_family_xdot(xi: float, t: ArrayLike) -> ArrayLike:
    """Special-family velocity 1/2 (1 + (xi^2 - 1) / (xi^2 + 2 xi cos t + 1))."""
    t = np.asarray(t, dtype=float)
    return _out(0.5 * (1.0 + (xi * xi - 1.0) / (xi * xi + 2.0 * xi * np.cos(t) + 1.0)))
