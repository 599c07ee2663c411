"""Command-line front end: ``singular-orbits <subcommand> [flags]``.

Exit codes: 0 success, 1 domain or usage error, 2 failed verification,
3 I/O failure. Diagnostics go to standard error; results to standard output
or the path given by ``--out`` / ``--svg`` / ``--csv-dir``.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import re
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import constants as K
from .closed_form import (
    OrbitClass,
    crossing_times,
    derive_params,
    normalize_initial,
    x_closed,
    xdot_closed,
)
from .companion import companion_integrate, companion_level, trace_level
from .energy import energy_residual
from .errors import DomainError, StepFailure
from .numeric import linearize
from .portrait_io import (
    PRESETS,
    emit_level_csv,
    orbit_series,
    portrait_spec_for,
    render_csv,
    render_svg,
)
from .series import TimeSeries
from .verification import format_table, run_battery

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_VERIFY = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, and reads ``-2/5`` as a value."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("exit_on_error", False)
        super().__init__(*args, **kwargs)
        # no flag starts with a digit, so '-3/4', '-0.1,0.2' and '-2..2' are values
        self._negative_number_matcher = re.compile(r"^-[\d.]")

    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage().rstrip()}")


def parse_number(text: str) -> float:
    """Decimal, exponent or ``p/q`` literal; fractions are rounded once, exactly."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or p/q fraction: {text!r}") from None
    return float(value)


def parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return parse_number(parts[0]), parse_number(parts[1])


def parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected LO..HI with integers, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}: need LO <= HI")
    return lo, hi


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="singular-orbits",
                     description="Orbits of d/dt(cos x/(1 - x')) = -sin x and its +sin x companion.")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    def orbit_flags(p):
        p.add_argument("--a", type=parse_number, required=True, help="initial position x(0)")
        p.add_argument("--b", type=parse_number, required=True, help="initial velocity x'(0)")

    p = sub.add_parser("solve", help="closed-form time series as CSV")
    orbit_flags(p)
    p.add_argument("--t0", type=parse_number, default=0.0)
    p.add_argument("--t1", type=parse_number, default=K.TWO_PI)
    p.add_argument("--n", type=positive_int, default=1000, help="number of samples")
    p.add_argument("--out", help="CSV path (default: standard output)")

    p = sub.add_parser("portrait", help="phase portrait as SVG and/or CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--orbit", type=parse_pair, action="extend", nargs="+", metavar="A,B")
    p.add_argument("--t0", type=parse_number, help="custom orbits only")
    p.add_argument("--t1", type=parse_number, help="custom orbits only")
    p.add_argument("--n", type=positive_int, default=1000, help="samples per custom orbit")
    p.add_argument("--svg", help="SVG path (default: standard output when --csv-dir is absent)")
    p.add_argument("--csv-dir", help="directory for one CSV per orbit")

    p = sub.add_parser("crossings", help="interface crossing times of an unbounded orbit")
    orbit_flags(p)
    p.add_argument("--count", type=positive_int, default=6)

    p = sub.add_parser("verify", help="run the invariant battery")
    orbit_flags(p)
    p.add_argument("--tol", type=parse_number, default=K.DEFAULT_INTEGRATOR_TOL)

    p = sub.add_parser("companion", help="companion equation: level, traced curve or integration")
    orbit_flags(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--trace", action="store_true", help="level curve CSV")
    mode.add_argument("--integrate", type=parse_number, metavar="T1", help="integrate on [0, T1]")
    p.add_argument("--n", type=positive_int, default=200, help="points per branch (--trace)")
    p.add_argument("--tol", type=parse_number, default=K.DEFAULT_INTEGRATOR_TOL)
    p.add_argument("--out", help="CSV path (default: standard output)")

    p = sub.add_parser("equilibria", help="linearization at (n pi, 0)")
    p.add_argument("--which", choices=("main", "companion"), default="main")
    p.add_argument("--n-range", type=parse_range, default=(0, 0), metavar="LO..HI")
    return parser


def _emit(text: str, path: str | None, stdout) -> None:
    if path is None:
        stdout.write(text)
        return
    with open(path, "wb") as fh:
        fh.write(text.encode("utf-8"))


def _cmd_solve(args, stdout, stderr) -> int:
    if not args.t0 < args.t1:
        raise DomainError(f"need t0 < t1, got t0={args.t0!r}, t1={args.t1!r}")
    if args.n < 2:
        raise DomainError("need at least 2 samples")
    p = derive_params(normalize_initial(args.a, args.b))
    t = np.linspace(args.t0, args.t1, args.n)
    if p.klass is OrbitClass.EQUILIBRIUM:
        x, v = np.full(t.size, p.init.x0), np.zeros(t.size)
    else:
        x, v = np.asarray(x_closed(p, t)), np.asarray(xdot_closed(p, t))
    series = TimeSeries(t, x, v, energy_residual(x, v, p.c), {"source": "closed_form"})
    _emit(render_csv(series), args.out, stdout)
    return EXIT_OK


def _cmd_portrait(args, stdout, stderr) -> int:
    if args.preset:
        if args.t0 is not None or args.t1 is not None:
            raise DomainError("--t0/--t1 apply to --orbit portraits only")
        spec, stem = PRESETS[args.preset], args.preset
    else:
        span = None
        if args.t0 is not None or args.t1 is not None:
            span = (args.t0 if args.t0 is not None else 0.0,
                    args.t1 if args.t1 is not None else 2 * K.TWO_PI)
            if not span[0] < span[1]:
                raise DomainError(f"need t0 < t1, got {span!r}")
        spec, stem = portrait_spec_for(args.orbit, span, args.n), "orbit"
    series = orbit_series(spec)
    svg = render_svg(spec, series)
    if args.csv_dir is not None:
        os.makedirs(args.csv_dir, exist_ok=True)
        for i, s in enumerate(series):
            _emit(render_csv(s), os.path.join(args.csv_dir, f"{stem}_{i}.csv"), stdout)
    if args.svg is not None or args.csv_dir is None:
        _emit(svg, args.svg, stdout)
    return EXIT_OK


def _cmd_crossings(args, stdout, stderr) -> int:
    p = derive_params(normalize_initial(args.a, args.b))
    times = crossing_times(p, 0, args.count - 1)
    lines = ["j,t,x,x_over_half_pi"]
    for j, t in enumerate(times):
        x = float(x_closed(p, t))
        lines.append(f"{j},{t!r},{x!r},{x / K.HALF_PI:.12f}")
    stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_verify(args, stdout, stderr) -> int:
    results = run_battery(args.a, args.b, args.tol)
    stdout.write(format_table(results) + "\n")
    failed = [r.name for r in results if not r.passed]
    if failed:
        stderr.write(f"verification failed: {len(failed)} of {len(results)} checks\n")
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_companion(args, stdout, stderr) -> int:
    level = companion_level(args.a, args.b)
    if args.trace:
        k = int(round(args.a / math.pi))
        curve = trace_level(level, max(args.n, 2), cells=(k,))
        buf = io.BytesIO()
        emit_level_csv(curve, buf)
        _emit(buf.getvalue().decode("utf-8"), args.out, stdout)
    elif args.integrate is not None:
        series = companion_integrate(args.a, args.b, 0.0, args.integrate, args.tol)
        _emit(render_csv(series), args.out, stdout)
    else:
        note = "  (degenerate: invariant line x' = 1)" if level.degenerate else ""
        stdout.write(f"c = {level.c!r}{note}\n")
    return EXIT_OK


def _cmd_equilibria(args, stdout, stderr) -> int:
    lo, hi = args.n_range
    lines = ["n,x,eigenvalue_1,eigenvalue_2,classification"]
    for n in range(lo, hi + 1):
        rep = linearize(n, args.which)
        eig = [f"{z.real:.9g}{z.imag:+.9g}j" for z in rep.eigenvalues]
        lines.append(f"{n},{rep.point[0]!r},{eig[0]},{eig[1]},{rep.classification}")
    stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {
    "solve": _cmd_solve,
    "portrait": _cmd_portrait,
    "crossings": _cmd_crossings,
    "verify": _cmd_verify,
    "companion": _cmd_companion,
    "equilibria": _cmd_equilibria,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except argparse.ArgumentError as exc:
        stderr.write(f"error: {exc}\n{parser.format_usage()}")
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_DOMAIN
    try:
        return COMMANDS[args.command](args, stdout, stderr)
    except DomainError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except StepFailure as exc:
        stderr.write(f"error: integration failed, {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        stderr.write(f"error: I/O failure: {exc}\n")
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
