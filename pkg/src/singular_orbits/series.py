"""Sampled trajectories shared by the closed form, the integrators and the writers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np


@dataclass
class TimeSeries:
    """Samples ``(t, x, xdot, residual)`` with strictly increasing ``t``.

    ``meta`` holds ``source`` (``"closed_form"``, ``"integrator"`` or
    ``"companion_integrator"``), the step tolerance when integrated, and an
    ``events`` log of located crossings / turning points.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    residual: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.residual = np.asarray(self.residual, dtype=float)
        n = self.t.shape
        if not (self.x.shape == self.v.shape == self.residual.shape == n) or self.t.ndim != 1:
            raise ValueError("TimeSeries columns must be 1-D arrays of equal length")
        if n[0] > 1 and not np.all(np.diff(self.t) > 0.0):
            raise ValueError("TimeSeries times must be strictly increasing")

    def __len__(self) -> int:
        return self.t.size

    def rows(self) -> Iterator[tuple[float, float, float, float]]:
        for row in zip(self.t.tolist(), self.x.tolist(), self.v.tolist(), self.residual.tolist()):
            yield row


def merge_samples(t, y, extra_t, extra_y, min_gap: float = 0.0):
    """Insert extra samples into a sorted trajectory, replacing any within ``min_gap``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(extra_t) == 0:
        return t, y
    extra_t = np.asarray(extra_t, dtype=float)
    extra_y = np.asarray(extra_y, dtype=float).reshape(len(extra_t), -1)
    keep = np.ones(t.size, dtype=bool)
    for te in extra_t:
        keep &= np.abs(t - te) > min_gap
    # never drop the endpoints
    keep[0] = keep[-1] = True
    inside = (extra_t > t[0]) & (extra_t < t[-1])
    t_all = np.concatenate((t[keep], extra_t[inside]))
    y_all = np.concatenate((y[keep], extra_y[inside]))
    order = np.argsort(t_all, kind="stable")
    t_all, y_all = t_all[order], y_all[order]
    uniq = np.concatenate(([True], np.diff(t_all) > 0.0))
    return t_all[uniq], y_all[uniq]
