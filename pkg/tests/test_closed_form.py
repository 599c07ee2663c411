import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from singular_orbits import constants as K
from singular_orbits.closed_form import (
    InitialData,
    OrbitClass,
    X_tan,
    crossing_times,
    derive_params,
    normalize_initial,
    orbit_params,
    period_info,
    psi,
    turning_times,
    velocity_denominator,
    velocity_extreme_times,
    x_closed,
    xdot_closed,
    xi_family_params,
    xi_family_xdot,
)
from singular_orbits.errors import (
    DomainError,
    ForbiddenVelocity,
    InvalidXi,
    NotApplicable,
    SingularPosition,
)

from .conftest import admissible, dense_grid, periodic, unbounded

T0 = math.acos(-1.0 / 3.0)


# ---------------------------------------------------------------- normalize

def test_normalize_keeps_normalized_input():
    assert normalize_initial(0.25, 0.75) == InitialData(0.25, 0.75, 0)


def test_normalize_translates_by_pi():
    init = normalize_initial(math.pi + 0.1, 0.3)
    assert init.shift_n == 1
    assert init.a == pytest.approx(0.1, abs=1e-15)
    assert init.b == 0.3


def test_normalize_rejects_odd_half_pi():
    with pytest.raises(SingularPosition):
        normalize_initial(math.pi / 2, 0.3)
    with pytest.raises(SingularPosition):
        normalize_initial(-3 * math.pi / 2, 0.3)


def test_normalize_rejects_unit_velocity():
    with pytest.raises(ForbiddenVelocity, match="b = 1"):
        normalize_initial(0.0, 1.0)


@pytest.mark.parametrize("a,b", [(math.inf, 0.1), (0.1, math.nan)])
def test_normalize_rejects_non_finite(a, b):
    with pytest.raises(DomainError):
        normalize_initial(a, b)


@given(st.floats(-50, 50), st.floats(-3, 4).filter(lambda b: b != 1.0))
def test_normalized_position_is_inside_principal_cell(a_raw, b):
    try:
        init = normalize_initial(a_raw, b)
    except SingularPosition:
        assert abs(math.cos(a_raw)) < 1e-12
        return
    assert abs(init.a) < K.HALF_PI
    assert init.x0 == pytest.approx(a_raw, abs=1e-12 * max(1.0, abs(a_raw)))


# ---------------------------------------------------------------- parameters

def test_params_fig2_inner_orbit():
    p = orbit_params(0.0, 0.75)
    assert (p.A, p.B, p.c, p.klass) == (0.0, 1.5, 8.0, OrbitClass.UNBOUNDED)
    assert p.branch == 1


def test_params_fig1_outer_orbit():
    p = orbit_params(0.0, 0.25)
    assert p.A == 0.0 and p.B == 0.5
    assert p.c == pytest.approx(-8.0 / 9.0, rel=1e-15)
    assert p.klass is OrbitClass.PERIODIC and p.branch == -1


def test_params_line_orbit():
    p = orbit_params(0.3, 0.5)
    assert p.klass is OrbitClass.LINE and p.c == 0.0


def test_params_equilibrium_after_shift():
    p = orbit_params(2 * math.pi, 0.0)
    assert p.klass is OrbitClass.EQUILIBRIUM
    assert p.equilibrium_index == 2


def test_derive_rejects_unit_velocity():
    with pytest.raises(ForbiddenVelocity):
        derive_params(InitialData(0.0, 1.0))


@given(admissible())
def test_identity_d1(ab):
    p = orbit_params(*ab)
    lhs = p.A ** 2 + p.B ** 2
    rhs = 4.0 * (1.0 - p.b) ** 2 * (1.0 + p.c)
    assert abs(lhs - rhs) <= K.IDENTITY_REL_TOL * max(1.0, lhs)


@given(admissible())
def test_c_sign_law(ab):
    p = orbit_params(*ab)
    if p.b < 0.5:
        # near an equilibrium c rounds onto -1 to within a few ulps
        assert -1.0 - 4e-16 <= p.c < 0.0
    else:
        assert p.c > 0.0


@given(admissible())
def test_amplitude_positive(ab):
    assert orbit_params(*ab).R > 0.0


# ---------------------------------------------------------------- velocity

def test_xdot_at_origin_is_initial_velocity():
    assert xdot_closed(orbit_params(0.0, 0.75), 0.0) == pytest.approx(0.75, abs=1e-15)


def test_xdot_fig1_at_half_period():
    assert xdot_closed(orbit_params(0.0, 0.25), math.pi) == pytest.approx(-0.5, abs=1e-14)


def test_xdot_at_first_crossing():
    assert xdot_closed(orbit_params(0.0, 0.75), T0) == pytest.approx(1.0, abs=1e-14)


def test_xdot_rejects_equilibrium():
    with pytest.raises(NotApplicable):
        xdot_closed(orbit_params(0.0, 0.0), 1.0)


def test_line_orbit_formulas():
    p = orbit_params(0.3, 0.5)
    assert xdot_closed(p, 7.0) == 0.5
    assert x_closed(p, 5.0) == pytest.approx(2.8, abs=1e-15)


@given(admissible())
def test_denominator_is_sum_of_squares(ab):
    p = orbit_params(*ab)
    t = dense_grid()
    squares = (p.A * np.cos(t) + p.B * np.sin(t)) ** 2 + (2 * (1 - p.b) + p.B * np.cos(t) - p.A * np.sin(t)) ** 2
    den = velocity_denominator(p, t)
    assert np.all(den > 0.0)
    assert np.allclose(den, squares, rtol=1e-12, atol=1e-12 * (p.A ** 2 + p.B ** 2 + 4 * (1 - p.b) ** 2))


@given(admissible())
def test_sign_barrier(ab):
    p = orbit_params(*ab)
    v = xdot_closed(p, dense_grid())
    assert np.all(np.sign(v - 0.5) == np.sign(p.b - 0.5))


# ---------------------------------------------------------------- psi and position

def test_psi_at_pi():
    assert psi(orbit_params(0.0, 0.75), math.pi) == pytest.approx(math.pi / 2, abs=1e-15)


def test_psi_special_value():
    expected = math.atan(0.5 * math.tan(0.5))
    assert psi(orbit_params(0.0, 0.75), 1.0) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.2666466, abs=1e-7)


def test_psi_extension_at_three_pi():
    assert psi(orbit_params(0.0, 0.75), 3 * math.pi) == pytest.approx(1.5 * math.pi, abs=1e-14)


@given(admissible())
def test_psi_continuous_and_increasing(ab):
    p = orbit_params(*ab)
    t = np.linspace(-3 * math.pi, 3 * math.pi, 6001)
    y = psi(p, t)
    assert np.all(np.diff(y) >= 0.0)
    assert np.allclose(psi(p, t + 2 * math.pi) - y, math.pi, atol=1e-12, rtol=0)
    odd = np.array([-3, -1, 1, 3]) * math.pi
    assert np.allclose(psi(p, odd), odd / 2, atol=1e-15, rtol=0)
    # left and right of an odd multiple of pi the values bracket it
    assert psi(p, math.pi - 1e-9) <= math.pi / 2 <= psi(p, math.pi + 1e-9)


def test_x_periodic_orbit_returns():
    assert x_closed(orbit_params(0.0, 0.25), 2 * math.pi) == pytest.approx(0.0, abs=1e-14)


def test_x_at_first_crossing_is_half_pi():
    assert x_closed(orbit_params(0.0, 0.75), T0) == pytest.approx(math.pi / 2, abs=1e-14)


def test_x_at_turning_time_is_amplitude():
    alpha = math.acos(2 * math.sqrt(2) / 3)
    assert x_closed(orbit_params(0.0, 0.25), T0) == pytest.approx(alpha, abs=1e-12)
    assert alpha == pytest.approx(0.33984, abs=1e-5)


@given(admissible())
def test_x_starts_at_initial_position(ab):
    p = orbit_params(*ab)
    assert x_closed(p, 0.0) == pytest.approx(p.a, abs=1e-14)


@given(st.integers(-3, 3), admissible(a_max=1.4))
def test_pi_translation_equivariance(n, ab):
    a, b = ab
    p0 = orbit_params(a, b)
    pn = orbit_params(a + n * math.pi, b)
    # a ~ 1e-17 rounds onto the equilibrium after the shift
    assume(pn.klass is p0.klass)
    t = np.linspace(-10, 10, 201)
    assert np.allclose(x_closed(pn, t), x_closed(p0, t) + n * math.pi, atol=1e-12, rtol=0)
    assert np.allclose(xdot_closed(pn, t), xdot_closed(p0, t), atol=1e-12, rtol=1e-12)


# ---------------------------------------------------------------- tangent form

def test_x_tan_at_origin():
    assert X_tan(orbit_params(0.2, 0.3), 0.0) == pytest.approx(math.tan(0.2), rel=1e-15)


def test_x_tan_denominator_bounded_away_for_periodic():
    p = orbit_params(0.0, 0.25)
    t = dense_grid()
    den = 2 * (1 - p.b) + p.B * np.cos(t) - p.A * np.sin(t)
    assert np.min(den) >= 2 * (1 - p.b) - p.R - 1e-15
    assert 2 * (1 - p.b) - p.R > 0


def test_x_tan_infinite_at_crossing():
    assert math.isinf(X_tan(orbit_params(0.0, 0.75), T0))


@given(admissible())
def test_tan_consistency(ab):
    p = orbit_params(*ab)
    t = dense_grid()
    x = x_closed(p, t)
    keep = np.abs(np.cos(x)) > K.TAN_CONSISTENCY_MIN_COS
    got = X_tan(p, t[keep])
    want = np.tan(x[keep])
    # |d tan / dx| = sec^2 x amplifies the rounding of x
    tol = K.TAN_CONSISTENCY_REL_TOL * np.maximum(1.0, np.abs(want)) + 1e-14 / np.cos(x[keep]) ** 2
    assert np.all(np.abs(got - want) <= tol)


# ---------------------------------------------------------------- derivative consistency

@given(admissible(min_abs_c=0.5))
def test_derivative_consistency(ab):
    # the O(h^2) truncation h^2 |x'''| / 6 stays under 1e-8 once |c| >= 1/2
    p = orbit_params(*ab)
    t = dense_grid(n=401)
    if p.klass is OrbitClass.UNBOUNDED:
        cr = np.array(crossing_times(p, -6, 6))
        t = t[np.min(np.abs(t[:, None] - cr[None, :]), axis=1) > 1e-3]
    h = K.FD_DERIVATIVE_STEP
    fd = (x_closed(p, t + h) - x_closed(p, t - h)) / (2 * h)
    assert np.max(np.abs(fd - xdot_closed(p, t))) <= K.FD_DERIVATIVE_TOL


@given(unbounded(min_abs_c=0.5))
def test_derivative_consistency_at_crossings(ab):
    p = orbit_params(*ab)
    t = np.array(crossing_times(p, -3, 3))
    h = K.FD_DERIVATIVE_STEP
    fd = (x_closed(p, t + h) - x_closed(p, t - h)) / (2 * h)
    assert np.max(np.abs(fd - xdot_closed(p, t))) <= K.FD_DERIVATIVE_TOL_AT_CROSSING


def test_derivative_consistency_all_orbits_with_richardson(rng):
    # sharply peaked orbits (c near 0) need the h^2 term removed
    for _ in range(200):
        a = rng.uniform(-1.5, 1.5)
        b = rng.uniform(-3, 4)
        p = orbit_params(a, b)
        t = np.linspace(0.05, 2 * math.pi, 97)
        if p.klass is OrbitClass.UNBOUNDED:
            cr = np.array(crossing_times(p, -2, 4))
            t = t[np.min(np.abs(t[:, None] - cr[None, :]), axis=1) > 1e-2]
        h = 1e-4

        def central(s):
            return (x_closed(p, t + s) - x_closed(p, t - s)) / (2 * s)

        fd = (4 * central(h / 2) - central(h)) / 3
        scale = max(1.0, float(np.max(np.abs(xdot_closed(p, t)))))
        assert np.max(np.abs(fd - xdot_closed(p, t))) <= 1e-6 * scale, (a, b, p.c)


# ---------------------------------------------------------------- periodicity and symmetry

@given(admissible())
def test_periodicity(ab):
    p = orbit_params(*ab)
    t = dense_grid()
    shift = 0.0 if p.klass is OrbitClass.PERIODIC else 2 * math.pi
    err = np.max(np.abs(x_closed(p, t + 2 * math.pi) - x_closed(p, t) - shift))
    assert err <= K.PERIODICITY_TOL


@given(st.floats(-3, 0.49).filter(lambda b: b != 0.0))
def test_symmetry_about_velocity_axis(b):
    p = orbit_params(0.0, b)
    t = dense_grid()
    assert np.max(np.abs(x_closed(p, -t) + x_closed(p, t))) <= K.SYMMETRY_TOL
    assert np.max(np.abs(xdot_closed(p, -t) - xdot_closed(p, t))) <= K.SYMMETRY_TOL


def test_period_info_examples():
    def fields(info):
        return info.velocity_period, info.mean_velocity, info.position_periodic

    assert fields(period_info(orbit_params(0.0, 0.25))) == (2 * math.pi, 0.0, True)
    assert fields(period_info(orbit_params(0.0, 0.75))) == (2 * math.pi, 1.0, False)
    info = period_info(orbit_params(0.3, 0.5))
    assert info.mean_velocity == 0.5 and not info.position_periodic
    with pytest.raises(NotApplicable):
        period_info(orbit_params(0.0, 0.0))


# ---------------------------------------------------------------- crossings and turning points

def test_crossings_fig2():
    t0, t1 = crossing_times(orbit_params(0.0, 0.75), 0, 1)
    assert t0 == pytest.approx(T0, abs=1e-15)
    assert t1 == pytest.approx(2 * math.pi - T0, abs=1e-14)
    assert t0 == pytest.approx(1.91063, abs=1e-5) and t1 == pytest.approx(4.37255, abs=1e-5)


def test_crossings_fast_orbit():
    p = orbit_params(0.0, 1.5)
    (t0,) = crossing_times(p)
    assert t0 == pytest.approx(math.acos(1.0 / 3.0), abs=1e-15)
    assert xdot_closed(p, t0) == pytest.approx(1.0, abs=1e-12)


def test_crossings_need_unbounded_orbit():
    with pytest.raises(NotApplicable):
        crossing_times(orbit_params(0.0, 0.25))


@given(unbounded())
def test_crossing_values(ab):
    p = orbit_params(*ab)
    tj = np.array(crossing_times(p, -4, 6))
    assert np.all(np.diff(tj) > 0)
    x = x_closed(p, tj)
    off = np.abs(np.mod(x - K.HALF_PI + K.HALF_PI, math.pi) - K.HALF_PI)
    assert np.max(off) <= K.CROSSING_VALUE_TOL
    assert np.max(np.abs(xdot_closed(p, tj) - 1.0)) <= K.CROSSING_VALUE_TOL
    # t_0 is the smallest positive root
    before = crossing_times(p, -1, -1)[0]
    assert before <= 0.0 < tj[4]


@given(unbounded())
def test_crossings_advance_half_pi_each(ab):
    p = orbit_params(*ab)
    x = x_closed(p, np.array(crossing_times(p, 0, 5)))
    assert np.allclose(np.diff(x), math.pi, atol=1e-9)


@given(periodic())
def test_turning_points_reach_amplitude(ab):
    p = orbit_params(*ab)
    # arccos(sqrt(-c)) loses all digits for amplitudes below ~1e-3
    assume(1.0 + p.c >= 1e-6)
    tt = np.array(turning_times(p, 0, 3))
    assert np.max(np.abs(xdot_closed(p, tt))) <= 1e-9 * max(1.0, 1.0 / abs(p.c))
    alpha = math.acos(math.sqrt(-p.c))
    assert np.allclose(np.abs(x_closed(p, tt)), alpha, atol=1e-9)


def test_velocity_extremes_fig2():
    p = orbit_params(0.0, 0.75)
    ts = velocity_extreme_times(p, 0.0, 2 * math.pi)
    v = sorted(xdot_closed(p, np.array(ts)))
    assert v[0] == pytest.approx(0.75, abs=1e-14) and v[-1] == pytest.approx(1.5, abs=1e-14)


# ---------------------------------------------------------------- one-parameter family

def test_xi_family_values():
    p = xi_family_params(3.0)
    assert (p.b, p.A, p.B) == (0.75, 0.0, 1.5)
    assert xi_family_params(1.0 / 3.0).b == pytest.approx(0.25, abs=1e-16)


@pytest.mark.parametrize("xi", [0.0, 1.0, -1.0, math.inf])
def test_xi_family_rejects(xi):
    with pytest.raises(InvalidXi):
        xi_family_params(xi)


@given(st.floats(-20, 20).filter(lambda x: min(abs(x), abs(x - 1), abs(x + 1)) > 1e-3))
def test_xi_family_agrees_with_general_formula(xi):
    p = xi_family_params(xi)
    t = dense_grid()
    assert np.allclose(xi_family_xdot(xi, t), xdot_closed(p, t), rtol=1e-12, atol=1e-12)
