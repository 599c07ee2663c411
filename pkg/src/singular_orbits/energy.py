"""First integral  cos^2 x (2v - 1) / (1 - v)^2 = c  and the geometry it fixes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as K
from .errors import InvalidLevel, SingularPosition, SingularVelocity


@dataclass(frozen=True)
class EnergyLevel:
    c: float
    alpha: float | None
    xdot_lo: float
    xdot_hi: float


def energy_value(x: float, v: float) -> float:
    if v == 1.0:
        raise SingularVelocity("energy quotient is undefined at v = 1")
    return math.cos(x) ** 2 * (2.0 * v - 1.0) / (1.0 - v) ** 2


def energy_residual(x, v, c):
    """Polynomial form ``cos^2 x (2v - 1) - c (1 - v)^2``.

    Vanishes along every orbit, including at interface crossings where the
    quotient form is 0/0. Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.cos(x) ** 2 * (2.0 * v - 1.0) - c * (1.0 - v) ** 2
    return float(out) if out.ndim == 0 else out


def xdot_branches(x: float, c: float) -> tuple[float, ...]:
    """Velocities on level ``c`` above position ``x``, ascending.

    Empty beyond the turning points of a bounded level, a single 0 at a
    turning point, ``(1/2,)`` on the line level ``c = 0``.
    """
    cx = math.cos(x)
    if cx == 0.0:
        raise SingularPosition("velocity branches are undefined where cos x = 0")
    if c == 0.0:
        return (0.5,)
    radicand = 1.0 + c / (cx * cx)
    if c > 0.0:
        s = math.sqrt(radicand)
        return (s / (s + 1.0), s / (s - 1.0))
    # a radicand within tolerance of 0 is a turning point
    if radicand < -K.TURNING_RADICAND_TOL:
        return ()
    if radicand <= K.TURNING_RADICAND_TOL:
        return (0.0,)
    s = math.sqrt(radicand)
    return (-s / (1.0 - s), s / (1.0 + s))


def level_bounds(c: float) -> EnergyLevel:
    if c <= -1.0 or c == 0.0 or not math.isfinite(c):
        raise InvalidLevel(
            f"level c = {c!r} has no strip/interval (c = 0 is the line orbit, c <= -1 the equilibrium)"
        )
    s = math.sqrt(1.0 + c)
    if c < 0.0:
        return EnergyLevel(c, math.acos(math.sqrt(-c)), -s / (1.0 - s), s / (1.0 + s))
    return EnergyLevel(c, None, s / (s + 1.0), s / (s - 1.0))
