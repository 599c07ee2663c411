import pytest

import singular_orbits.verification as verification
from singular_orbits.errors import DomainError, StepFailure
from singular_orbits.verification import format_table, run_battery

from .conftest import FIGURE_ORBITS


@pytest.mark.parametrize("a,b", FIGURE_ORBITS)
def test_battery_passes_on_figure_orbits(a, b):
    results = run_battery(a, b)
    assert all(r.passed for r in results), format_table(results)
    names = " ".join(r.name for r in results)
    for key in ("identity", "energy residual", "x(t+2pi)", "mean velocity", "equation residual",
                "integrator vs closed form", "drift"):
        assert key in names
    assert ("crossings" in names) == (b > 0.5)


def test_battery_line_orbit():
    results = run_battery(0.2, 0.5)
    assert all(r.passed for r in results)
    assert not any("mean velocity" in r.name for r in results)


def test_battery_equilibrium():
    (only,) = run_battery(0.0, 0.0)
    assert only.passed and "equilibrium" in only.name


def test_battery_rejects_forbidden_data():
    with pytest.raises(DomainError):
        run_battery(0.0, 1.0)


def test_tol_scales_thresholds():
    base = run_battery(0.0, 0.25)
    loose = run_battery(0.0, 0.25, tol=1e-8)
    for r0, r1 in zip(base, loose):
        assert r0.name == r1.name
        assert r1.threshold == pytest.approx(100 * r0.threshold)


def test_step_failure_becomes_failed_row(monkeypatch):
    real = verification.integrate

    def flaky(init, t0, t1, tol=1e-10):
        if t1 == 20.0:
            raise StepFailure(3.0, 1e-15, (0.1, 0.2))
        return real(init, t0, t1, tol)

    monkeypatch.setattr(verification, "integrate", flaky)
    results = run_battery(0.0, 0.75)
    last = results[-1]
    assert not last.passed and "integrator run" in last.name
    assert "FAIL" in format_table(results)


def test_table_is_deterministic():
    assert format_table(run_battery(0.0, -0.4)) == format_table(run_battery(0.0, -0.4))
