import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

from singular_orbits.closed_form import OrbitClass, orbit_params

# derandomized so the suite verdict never changes between runs
settings.register_profile(
    "repro",
    derandomize=True,
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("repro")

FIGURE_ORBITS = [(0.0, 0.25), (0.0, -0.4), (0.0, 0.75), (0.0, 1.5)]


@st.composite
def admissible(draw, a_max=1.5, b_lo=-3.0, b_hi=4.0, min_abs_c=0.0, klass=None):
    """(a, b) with |a| <= a_max, b != 1/2, 1 and |c| >= min_abs_c."""
    a = draw(st.floats(-a_max, a_max, allow_nan=False))
    b = draw(st.floats(b_lo, b_hi, allow_nan=False).filter(lambda b: b not in (0.5, 1.0)))
    if a == 0.0 and b == 0.0:
        b = 0.25
    p = orbit_params(a, b)
    assume(klass is None or p.klass is klass)
    assume(abs(p.c) >= min_abs_c)
    return a, b


def periodic(**kw):
    return admissible(b_lo=-3.0, b_hi=0.49, klass=OrbitClass.PERIODIC, **kw)


def unbounded(**kw):
    return admissible(b_lo=0.51, b_hi=4.0, klass=OrbitClass.UNBOUNDED, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def dense_grid(lo=-4 * math.pi, hi=4 * math.pi, n=801):
    return np.linspace(lo, hi, n)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance as acc

    if not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.report_line(n))
