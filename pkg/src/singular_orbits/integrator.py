"""Dormand-Prince 5(4) integrator with PI step control, dense output and events.

Error control is per unit step: a step of size ``h`` is accepted when the
embedded error estimate satisfies ``|err_i| <= tol * h * (1 + |y_i|)``.
Accepted steps are sub-sampled through the 4th-order continuous extension
so that straight-line interpolation between consecutive output samples stays
within ``10 * tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .constants import EVENT_T_TOL
from .errors import StepFailure

Field = Callable[[float, np.ndarray], np.ndarray]
EventFn = Callable[[float, np.ndarray], float]

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# fifth-order minus embedded fourth-order weights
E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension: y(t + s h) = y + h * K^T @ P @ [s, s^2, s^3, s^4]
P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
ALPHA = 0.7 / 5
BETA = 0.4 / 5


@dataclass
class Event:
    name: str
    t: float
    y: np.ndarray


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    events: list[Event] = field(default_factory=list)
    n_steps: int = 0
    n_rejected: int = 0
    capped: bool = False


@dataclass
class Step:
    t: float
    h: float
    y: np.ndarray
    k: np.ndarray

    def __call__(self, s) -> np.ndarray:
        """Dense state at ``t + s * h``; ``s`` scalar or 1-D array in [0, 1]."""
        s = np.asarray(s, dtype=float)
        powers = np.stack([s, s * s, s ** 3, s ** 4], axis=-1)
        q = self.k.T @ P  # (dim, 4)
        return self.y + self.h * powers @ q.T


def dopri_step(f: Field, t: float, y: np.ndarray, h: float, k0: np.ndarray):
    """One Dormand-Prince step; returns (y_new, k_stages, err_vector)."""
    k = np.empty((7, y.size))
    k[0] = k0
    for i in range(1, 7):
        k[i] = f(t + C[i] * h, y + h * (np.asarray(A[i]) @ k[:i]))
    y_new = y + h * (B5 @ k)
    err = h * (E @ k)
    return y_new, k, err


def _sample_spacing(step: Step, k: np.ndarray, tol: float) -> int:
    # |y''| bounded by slope difference quotients across the stages
    h = step.h
    if h <= 0.0:
        return 1
    curv = float(np.max(np.abs(k[1:] - k[0]) / (C[1:, None] * h)))
    if not curv > 0.0:
        return 1
    spacing = math.sqrt(60.0 * tol / curv)
    return max(1, min(100000, math.ceil(h / spacing)))


def _locate(step: Step, g: EventFn, s_lo: float, s_hi: float, g_lo: float) -> float:
    while (s_hi - s_lo) * step.h > EVENT_T_TOL:
        mid = 0.5 * (s_lo + s_hi)
        g_mid = g(step.t + mid * step.h, step(mid))
        if g_mid == 0.0:
            return mid
        if (g_mid > 0.0) == (g_lo > 0.0):
            s_lo, g_lo = mid, g_mid
        else:
            s_hi = mid
    return 0.5 * (s_lo + s_hi)


def integrate(
    f: Field,
    t0: float,
    t1: float,
    y0: Sequence[float],
    tol: float,
    events: dict[str, EventFn] | None = None,
    h0: float | None = None,
    max_samples: int = 2_000_000,
) -> Trajectory:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t1 > t0``.

    Event functions are called as ``g(t, y)`` with either a scalar ``t`` and a
    state vector, or arrays ``t`` of shape (m,) and ``y`` of shape (m, dim);
    write them in terms of ``y[..., i]``. Every sign change is located by
    bisection on the dense interpolant.

    Once ``max_samples`` output points have been produced, later steps are
    recorded at their endpoints only and ``Trajectory.capped`` is set.
    """
    events = events or {}
    t = float(t0)
    y = np.array(y0, dtype=float)
    span = float(t1) - t
    h = min(span, h0 if h0 is not None else 1e-3)
    k0 = f(t, y)
    ts: list[np.ndarray] = [np.array([t])]
    ys: list[np.ndarray] = [y[None, :]]
    found: list[Event] = []
    g_prev = {name: g(t, y) for name, g in events.items()}
    err_prev = 1.0
    n_steps = n_rej = 0
    n_out = 1
    capped = False

    while t < t1:
        h_min = 16.0 * np.finfo(float).eps * max(1.0, abs(t))
        if h < h_min:
            raise StepFailure(t, h, y)
        last = t + h >= t1
        if last:
            h = t1 - t
        y_new, k, err = dopri_step(f, t, y, h, k0)
        scale = tol * h * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
        err_norm = float(np.max(np.abs(err) / scale)) if np.all(np.isfinite(y_new)) else np.inf
        if err_norm > 1.0:
            n_rej += 1
            fac = max(FAC_MIN, SAFETY * err_norm ** -ALPHA) if np.isfinite(err_norm) else FAC_MIN
            h *= fac
            continue

        step = Step(t, h, y, k)
        m = _sample_spacing(step, k, tol)
        if n_out + m > max_samples:
            capped = capped or m > 1
            m = 1
        n_out += m
        s_grid = np.arange(1, m + 1) / m
        y_grid = step(s_grid)
        y_grid[-1] = y_new
        t_grid = t + s_grid * h
        t_grid[-1] = t1 if last else t + h

        for name, g in events.items():
            g_all = np.concatenate(([g_prev[name]], np.asarray(g(t_grid, y_grid), dtype=float)))
            s_all = np.concatenate(([0.0], s_grid))
            lo, hi = g_all[:-1], g_all[1:]
            hits = np.flatnonzero((lo != 0.0) & ((hi == 0.0) | ((hi > 0.0) != (lo > 0.0))))
            for i in hits:
                s_ev = s_all[i + 1] if hi[i] == 0.0 else _locate(step, g, s_all[i], s_all[i + 1], lo[i])
                found.append(Event(name, t + s_ev * h, step(s_ev)))
            g_prev[name] = g_all[-1]

        ts.append(t_grid)
        ys.append(y_grid)
        n_steps += 1
        t = t_grid[-1]
        y = y_new
        k0 = k[6]
        fac = SAFETY * max(err_norm, 1e-10) ** -ALPHA * err_prev ** BETA
        h *= min(FAC_MAX, max(FAC_MIN, fac))
        err_prev = max(err_norm, 1e-4)

    found.sort(key=lambda e: e.t)
    return Trajectory(np.concatenate(ts), np.concatenate(ys), found, n_steps, n_rej, capped)
