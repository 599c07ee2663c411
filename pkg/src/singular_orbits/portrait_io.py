"""Orbit sampling, CSV time series and SVG phase portraits.

CSV: header ``t,x,xdot,residual``, one LF-terminated row per sample, every
number written as the shortest decimal that round-trips the binary64 value
(integral values lose their trailing ``.0``).

SVG: a standalone SVG 1.1 document using only ``svg``, ``line``,
``polyline`` and ``text`` elements. The data-to-pixel map is affine with the
vertical axis flipped; pixel coordinates are written with three decimals.
Guide lines are dashed grey; orbits cycle through :data:`PALETTE`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Sequence, Union

import numpy as np

from . import constants as K
from .closed_form import (
    InitialData,
    OrbitClass,
    OrbitParams,
    crossing_times,
    derive_params,
    normalize_initial,
    turning_times,
    velocity_extreme_times,
    x_closed,
    xdot_closed,
)
from .companion import CompanionLevel, LevelCurve, level_function, trace_level
from .energy import energy_residual, level_bounds
from .errors import DomainError, NotApplicable, SinkError
from .series import TimeSeries

CSV_HEADER = "t,x,xdot,residual"
LEVEL_CSV_HEADER = "x,xdot,branch"

PALETTE = ("#1f4e9a", "#b2361f", "#2d7d3a", "#7a3f98", "#a66b00", "#2b8a8a")
GUIDE_COLOR = "#888888"
AXIS_COLOR = "#000000"
ORBIT_STROKE = 1.5
GUIDE_STROKE = 1.0
AXIS_STROKE = 1.0
MARGIN = 60.0
FONT_SIZE = 14


class CanvasRangeError(DomainError):
    """A sample falls outside the canvas and clipping is off."""


@dataclass(frozen=True)
class Canvas:
    width: int = 800
    height: int = 600
    x_range: tuple[float, float] = (-1.0, 1.0)
    v_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if self.width <= 2 * MARGIN or self.height <= 2 * MARGIN:
            raise DomainError(f"canvas must exceed {2 * MARGIN:g} px in both directions")
        if not (self.x_range[0] < self.x_range[1] and self.v_range[0] < self.v_range[1]):
            raise DomainError("canvas ranges must be nonempty")

    def to_px(self, x, v):
        x0, x1 = self.x_range
        v0, v1 = self.v_range
        px = MARGIN + (np.asarray(x) - x0) / (x1 - x0) * (self.width - 2 * MARGIN)
        py = self.height - MARGIN - (np.asarray(v) - v0) / (v1 - v0) * (self.height - 2 * MARGIN)
        return px, py

    def from_px(self, px, py):
        x0, x1 = self.x_range
        v0, v1 = self.v_range
        x = x0 + (np.asarray(px) - MARGIN) / (self.width - 2 * MARGIN) * (x1 - x0)
        v = v0 + (self.height - MARGIN - np.asarray(py)) / (self.height - 2 * MARGIN) * (v1 - v0)
        return x, v

    def contains(self, x, v):
        x = np.asarray(x)
        v = np.asarray(v)
        return ((x >= self.x_range[0]) & (x <= self.x_range[1])
                & (v >= self.v_range[0]) & (v <= self.v_range[1]))


@dataclass(frozen=True)
class GuideLines:
    line_orbit: bool = True      # v = 1/2
    interface: bool = False      # v = 1
    strip_bounds: bool = False   # level bounds of each orbit


@dataclass
class PortraitSpec:
    orbits: list[Union[InitialData, CompanionLevel]]
    t_span: tuple[float, float] = (0.0, K.TWO_PI)
    samples_per_orbit: int = 1000
    guide_lines: GuideLines = field(default_factory=GuideLines)
    canvas: Canvas = field(default_factory=Canvas)
    clip: bool = False
    title: str = ""

    def __post_init__(self):
        if self.samples_per_orbit < 2:
            raise DomainError("samples_per_orbit must be at least 2")
        if not self.t_span[0] < self.t_span[1]:
            raise DomainError("t_span must satisfy t0 < t1")


def special_times(p: OrbitParams, t0: float, t1: float) -> list[float]:
    """Velocity extrema, crossings and turning points inside [t0, t1]."""
    if p.klass not in (OrbitClass.PERIODIC, OrbitClass.UNBOUNDED):
        return []
    out = velocity_extreme_times(p, t0, t1)
    roots = crossing_times if p.klass is OrbitClass.UNBOUNDED else turning_times
    j_lo = 2 * math.floor(t0 / K.TWO_PI) - 2
    j_hi = 2 * math.ceil(t1 / K.TWO_PI) + 2
    out += [t for t in roots(p, j_lo, j_hi) if t0 <= t <= t1]
    return sorted(out)


def sample_closed_form(p: OrbitParams, t0: float, t1: float, n: int,
                       special: bool = True) -> TimeSeries:
    """Closed-form samples on a uniform grid of ``n`` points, plus special times."""
    if p.klass is OrbitClass.EQUILIBRIUM:
        raise NotApplicable("an equilibrium is a single point; use equilibrium_series")
    t = np.linspace(t0, t1, n)
    if special:
        t = np.unique(np.concatenate((t, special_times(p, t0, t1))))
        # drop grid points that collide with a special time to keep t strictly increasing
        keep = np.concatenate(([True], np.diff(t) > 1e-12))
        t = t[keep]
    x = np.asarray(x_closed(p, t), dtype=float)
    v = np.asarray(xdot_closed(p, t), dtype=float)
    return TimeSeries(t, x, v, energy_residual(x, v, p.c), {"source": "closed_form"})


def sample_orbit(p: OrbitParams, spec: PortraitSpec) -> TimeSeries:
    return sample_closed_form(p, spec.t_span[0], spec.t_span[1], spec.samples_per_orbit)


def equilibrium_series(p: OrbitParams) -> TimeSeries:
    x0 = p.init.x0
    return TimeSeries([0.0], [x0], [0.0], [0.0], {"source": "closed_form"})


def format_float(value: float) -> str:
    """Shortest decimal that round-trips ``value``; ``1.0`` becomes ``1``."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def render_csv(series: TimeSeries) -> str:
    if len(series) == 0:
        raise DomainError("cannot write an empty time series")
    lines = [CSV_HEADER]
    lines += [",".join(map(format_float, row)) for row in series.rows()]
    return "\n".join(lines) + "\n"


def _write(sink: BinaryIO, text: str) -> None:
    try:
        sink.write(text.encode("utf-8"))
    except OSError as exc:
        raise SinkError(str(exc)) from exc


def emit_csv(series: TimeSeries, sink: BinaryIO) -> None:
    _write(sink, render_csv(series))


def read_csv(source: Union[bytes, str, BinaryIO]) -> TimeSeries:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    lines = source.split("\n")
    if lines[0] != CSV_HEADER:
        raise DomainError(f"unexpected CSV header {lines[0]!r}")
    rows = [tuple(float(f) for f in line.split(",")) for line in lines[1:] if line]
    cols = np.array(rows, dtype=float).reshape(-1, 4)
    return TimeSeries(cols[:, 0], cols[:, 1], cols[:, 2], cols[:, 3], {"source": "csv"})


def emit_level_csv(curve: LevelCurve, sink: BinaryIO) -> None:
    if curve.x.size == 0:
        raise DomainError("cannot write an empty level curve")
    lines = [LEVEL_CSV_HEADER]
    lines += [f"{format_float(x)},{format_float(v)},{br}" for x, v, br in curve.points()]
    _write(sink, "\n".join(lines) + "\n")


def level_curve_paths(curve: LevelCurve) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split a traced level into drawable runs (one per branch and component)."""
    paths = []
    start = 0
    n = curve.x.size
    for i in range(1, n + 1):
        if i == n or curve.branch[i] != curve.branch[start] or curve.x[i] <= curve.x[i - 1]:
            paths.append((curve.x[start:i], curve.v[start:i]))
            start = i
    return paths


def _fmt_px(value: float) -> str:
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _svg_line(canvas: Canvas, x0, v0, x1, v1, color, width, dashed=False) -> str:
    (px0, px1), (py0, py1) = canvas.to_px([x0, x1], [v0, v1])
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return (f'<line x1="{_fmt_px(px0)}" y1="{_fmt_px(py0)}" x2="{_fmt_px(px1)}" y2="{_fmt_px(py1)}" '
            f'stroke="{color}" stroke-width="{width:g}"{dash}/>')


def _svg_text(x: float, y: float, text: str, anchor: str = "middle") -> str:
    text = text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return (f'<text x="{_fmt_px(x)}" y="{_fmt_px(y)}" font-family="sans-serif" '
            f'font-size="{FONT_SIZE}" text-anchor="{anchor}">{text}</text>')


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    raw = (hi - lo) / count
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step)
    return [k * step for k in range(first, math.floor(hi / step) + 1)]


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    out, start = [], None
    for i, ok in enumerate(mask.tolist() + [False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            out.append((start, i))
            start = None
    return out


def _orbit_paths(orbit) -> list[tuple[np.ndarray, np.ndarray]]:
    if isinstance(orbit, TimeSeries):
        return [(orbit.x, orbit.v)]
    if isinstance(orbit, LevelCurve):
        return level_curve_paths(orbit)
    x, v = orbit
    return [(np.asarray(x, dtype=float), np.asarray(v, dtype=float))]


def _strip_levels(spec: PortraitSpec) -> list[float]:
    out = []
    for orbit in spec.orbits:
        if not isinstance(orbit, InitialData):
            continue
        p = derive_params(orbit)
        if p.klass in (OrbitClass.PERIODIC, OrbitClass.UNBOUNDED):
            lvl = level_bounds(p.c)
            out += [lvl.xdot_lo, lvl.xdot_hi]
    return sorted(set(out))


def render_svg(portrait: PortraitSpec, orbits: Sequence) -> str:
    cv = portrait.canvas
    W, H = cv.width, cv.height
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
    ]
    x0, x1 = cv.x_range
    v0, v1 = cv.v_range
    # frame and axes
    parts.append(_svg_line(cv, x0, v0, x1, v0, AXIS_COLOR, AXIS_STROKE))
    parts.append(_svg_line(cv, x0, v0, x0, v1, AXIS_COLOR, AXIS_STROKE))
    if v0 < 0.0 < v1:
        parts.append(_svg_line(cv, x0, 0.0, x1, 0.0, GUIDE_COLOR, AXIS_STROKE))
    if x0 < 0.0 < x1:
        parts.append(_svg_line(cv, 0.0, v0, 0.0, v1, GUIDE_COLOR, AXIS_STROKE))
    for tx in _ticks(x0, x1):
        px, py = cv.to_px(tx, v0)
        parts.append(_svg_text(float(px), float(py) + 18, format_float(round(tx, 10))))
    for tv in _ticks(v0, v1):
        px, py = cv.to_px(x0, tv)
        parts.append(_svg_text(float(px) - 8, float(py) + 5, format_float(round(tv, 10)), "end"))
    parts.append(_svg_text(W / 2, H - 15, "x"))
    parts.append(_svg_text(18, H / 2, "y = x'"))
    if portrait.title:
        parts.append(_svg_text(W / 2, 30, portrait.title))

    guides = []
    g = portrait.guide_lines
    if g.line_orbit:
        guides.append(0.5)
    if g.interface:
        guides.append(1.0)
    if g.strip_bounds:
        guides += _strip_levels(portrait)
    for level in sorted(set(guides)):
        if v0 <= level <= v1:
            parts.append(_svg_line(cv, x0, level, x1, level, GUIDE_COLOR, GUIDE_STROKE, dashed=True))

    for i, orbit in enumerate(orbits):
        color = PALETTE[i % len(PALETTE)]
        for x, v in _orbit_paths(orbit):
            inside = cv.contains(x, v)
            if not portrait.clip and not np.all(inside):
                raise CanvasRangeError(
                    f"orbit {i} leaves the canvas x{cv.x_range} v{cv.v_range}; enable clipping"
                )
            px, py = cv.to_px(x, v)
            for lo, hi in _runs(inside):
                if hi - lo < 2:
                    continue
                pts = " ".join(f"{_fmt_px(a)},{_fmt_px(b)}" for a, b in zip(px[lo:hi], py[lo:hi]))
                parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                             f'stroke-width="{ORBIT_STROKE:g}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_svg(portrait: PortraitSpec, orbits: Sequence, sink: BinaryIO) -> None:
    _write(sink, render_svg(portrait, orbits))


def read_svg_polylines(svg: str, canvas: Canvas) -> list[tuple[np.ndarray, np.ndarray]]:
    """Recover data coordinates of every orbit polyline in an emitted SVG."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg.encode("utf-8"))
    out = []
    for el in root.iter("{http://www.w3.org/2000/svg}polyline"):
        pts = np.array([[float(s) for s in pair.split(",")] for pair in el.get("points").split()])
        out.append(canvas.from_px(pts[:, 0], pts[:, 1]))
    return out


FIG1 = PortraitSpec(
    orbits=[InitialData(0.0, 0.25), InitialData(0.0, -0.4)],
    t_span=(0.0, K.TWO_PI),
    samples_per_orbit=1000,
    guide_lines=GuideLines(line_orbit=True, interface=False, strip_bounds=False),
    canvas=Canvas(800, 600, (-0.45, 0.45), (-0.6, 0.6)),
    title="a = 0, b = 1/4 and b = -2/5",
)

FIG2 = PortraitSpec(
    orbits=[InitialData(0.0, 0.75), InitialData(0.0, 1.5)],
    t_span=(-K.TWO_PI, K.TWO_PI),
    samples_per_orbit=2000,
    guide_lines=GuideLines(line_orbit=True, interface=True, strip_bounds=True),
    canvas=Canvas(900, 600, (-7.0, 7.0), (0.4, 1.7)),
    title="a = 0, b = 3/4 and b = 3/2",
)

PRESETS = {"fig1": FIG1, "fig2": FIG2}


def orbit_series(spec: PortraitSpec) -> list:
    """Sample every orbit of a portrait (closed form or traced companion level)."""
    out = []
    for orbit in spec.orbits:
        if isinstance(orbit, CompanionLevel):
            out.append(trace_level(orbit, spec.samples_per_orbit, cells=(-1, 0, 1), include_negative=True))
            continue
        p = derive_params(orbit)
        if p.klass is OrbitClass.EQUILIBRIUM:
            out.append(equilibrium_series(p))
        else:
            out.append(sample_orbit(p, spec))
    return out


def portrait_spec_for(pairs: Iterable[tuple[float, float]], t_span=None, n: int = 1000) -> PortraitSpec:
    """Portrait of arbitrary orbits with a canvas fitted to the samples."""
    inits = [normalize_initial(a, b) for a, b in pairs]
    span = t_span or (0.0, 2 * K.TWO_PI)
    probe = PortraitSpec(inits, span, n, canvas=Canvas())
    xs, vs = [], []
    for s in orbit_series(probe):
        xs.append(s.x)
        vs.append(s.v)
    if xs:
        x_all, v_all = np.concatenate(xs), np.concatenate(vs)
        xr = (float(x_all.min()), float(x_all.max()))
        vr = (float(min(v_all.min(), 0.5)), float(max(v_all.max(), 0.5)))
    else:
        xr, vr = (-1.0, 1.0), (-1.0, 1.0)
    padx = 0.05 * (xr[1] - xr[0]) or 0.5
    padv = 0.05 * (vr[1] - vr[0]) or 0.5
    unbounded = any(derive_params(i).klass is OrbitClass.UNBOUNDED for i in inits)
    return PortraitSpec(
        inits, span, n,
        guide_lines=GuideLines(True, unbounded, True),
        canvas=Canvas(800, 600, (xr[0] - padx, xr[1] + padx), (vr[0] - padv, vr[1] + padv)),
    )


def level_residual(curve: LevelCurve) -> np.ndarray:
    return level_function(curve.v) - curve.level.c * np.cos(curve.x)


__all__ = [
    "Canvas", "GuideLines", "PortraitSpec", "CanvasRangeError", "FIG1", "FIG2", "PRESETS",
    "sample_orbit", "sample_closed_form", "emit_csv", "read_csv", "emit_svg", "render_svg",
    "render_csv", "emit_level_csv", "format_float", "orbit_series", "portrait_spec_for",
    "read_svg_polylines", "special_times", "equilibrium_series", "level_residual",
]
