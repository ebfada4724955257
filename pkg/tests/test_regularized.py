import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anyon_orbits import regularized as rg
from anyon_orbits.regularized import FluxProfile


def test_profile_requires_positive_radius():
    with pytest.raises(ValueError):
        FluxProfile(0.0, 0.3)


def test_flux_profile_shape():
    p = FluxProfile(0.1, 0.4)
    assert p.flux(0.0) == 0.0
    assert p.flux(0.05) == pytest.approx(2 * np.pi * 0.4 * 0.25)
    assert p.flux(0.1) == pytest.approx(2 * np.pi * 0.4)
    assert p.flux(3.0) == pytest.approx(2 * np.pi * 0.4)
    assert p.b_field(0.05) == pytest.approx(2 * 0.4 / 0.01)
    assert p.b_field(0.2) == 0.0


@given(r=st.floats(1e-3, 5.0), ell=st.floats(-2, 2), alpha=st.floats(0, 1))
def test_effective_term(r, ell, alpha):
    p = FluxProfile(1e-3, alpha)
    val = rg.effective_angular_term(r, p, ell)
    assert val == pytest.approx(ell - alpha, abs=1e-12)


def test_effective_term_at_origin():
    assert rg.effective_angular_term(0.0, FluxProfile(0.1, 0.5), 0.7) == 0.7


def test_inaccessible_initial_state_rejected():
    st_ = rg.PolarOrbitState(0.1, 0.0, 1, 1.0, 2.0)
    with pytest.raises(ValueError):
        rg.integrate_orbit(1.0, 2.0, FluxProfile(0.05, 0.0), initial=st_)


def test_exterior_ellipse_matches_shifted_oscillator():
    res = rg.integrate_orbit(1.0, 0.9, FluxProfile(1e-3, 0.3), t_max=2.2 * np.pi)
    assert res.classification.kind == "exterior_ellipse"
    assert res.classification.period == pytest.approx(2 * np.pi, abs=1e-8)
    assert rg.exterior_ellipse_deviation(res) < 1e-8
    ells = res.exterior_angular_momenta()
    assert np.ptp(ells) < 1e-9 and ells[0] == pytest.approx(0.9)


def test_plain_oscillator_radial_line():
    lim = rg.classify_limit(1.0, 0.0, 0.0, [1e-1, 1e-2, 1e-3])
    assert lim.kind == "reflecting_radial" and lim.through_origin
    assert lim.deflections == [0.0, 0.0, 0.0]
    assert lim.period == pytest.approx(np.pi, abs=1e-6)


def test_crossing_orbit_small_deflection():
    res = rg.integrate_orbit(1.0, 0.3, FluxProfile(1e-2, 0.3), t_max=1.2 * np.pi)
    assert res.crossings and res.crossings[0][1] == "enter"
    d = rg.interior_deflection(1.0, 0.3, 1e-2)
    assert abs(d.delta_theta) < 0.05


def test_conservation_along_crossing_orbit():
    res = rg.integrate_orbit(1.0, 0.55, FluxProfile(0.1, 0.5), t_max=2.2 * np.pi)
    assert res.classification.kind == "crossing"
    assert np.ptp(res.energies()) < 1e-8
    assert np.ptp(res.exterior_angular_momenta()) < 1e-8
    assert rg.exterior_ellipse_deviation(res) < 1e-6
    cols = res.table()
    assert set(cols) == {"t", "r", "theta", "x", "y", "r_dot", "theta_dot", "region"}
    assert np.all(np.diff(cols["t"]) >= 0)


def test_alpha_zero_deflection_is_exactly_zero():
    d = rg.interior_deflection(1.0, 0.0, 1e-2)
    assert d.delta_theta == 0.0 and d.raw_angle == math.pi


def test_deflection_decreases_and_is_small():
    eps = [1e-1, 1e-2, 1e-3]
    d = [abs(rg.interior_deflection(1.0, 0.5, e).delta_theta) for e in eps]
    assert d[0] > d[1] > d[2]
    assert d[2] < 0.01


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
def test_deflection_matches_exact_oracle(eps):
    num = rg.interior_deflection(1.0, 0.5, eps).delta_theta
    ref = rg.interior_deflection_exact(1.0, 0.5, eps)
    assert num == pytest.approx(ref, abs=1e-9)


def test_reflected_exit():
    d = rg.interior_deflection(1.0, 0.5, 1e-2, theta_entry=0.4)
    assert d.reflected
    assert d.outgoing_r_dot > 0
    x, y = d.exit_state[:2]
    assert math.hypot(x, y) == pytest.approx(1e-2, rel=1e-9)
    assert math.atan2(y, x) == pytest.approx(0.4 + d.delta_theta, abs=1e-12)
    assert d.turning_radius is not None and d.turning_radius < 1e-2


def test_deflection_vanishes_with_positive_exponent():
    eps = [1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3]
    d = [abs(rg.interior_deflection(1.0, 0.5, e).delta_theta) for e in eps]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert rg.deflection_exponent(eps, d) > 0.5


def test_reflecting_limit_half_period():
    lim = rg.classify_limit(1.0, 0.5, 0.5, [1e-1, 1e-2, 1e-3, 1e-4])
    assert lim.kind == "reflecting_radial" and lim.monotone and not lim.flagged
    assert abs(lim.period - np.pi) < 1e-6


def test_limit_exterior_ellipse():
    lim = rg.classify_limit(1.0, 1.0, 0.5, [1e-1, 1e-2, 1e-3])
    assert lim.kind == "exterior_ellipse" and not lim.flagged
    assert lim.period == pytest.approx(2 * np.pi, abs=1e-8)


def test_limit_rejects_bad_sequence():
    with pytest.raises(ValueError):
        rg.classify_limit(1.0, 0.5, 0.5, [1e-3, 1e-2])
    with pytest.raises(ValueError):
        rg.classify_limit(1.0, 0.5, 0.5, [1e-1, 0.0])


def test_crossing_window_frozen():
    lo, hi = rg.crossing_window(1.0, 0.5, 0.1)
    half = 0.1 * math.sqrt(2 - 0.01)
    assert (lo, hi) == pytest.approx((0.5 - half, 0.5 + half))


def test_crossing_window_by_integration():
    lo, hi = rg.crossing_window(1.0, 0.5, 0.1)
    ells = [lo - 0.01, lo + 0.01, 0.5, hi - 0.01, hi + 0.01]
    entered = [e for _, e in rg.scan_crossing_window(1.0, 0.5, 0.1, ells)]
    assert entered == [False, True, True, True, False]


@settings(max_examples=10, deadline=None)
@given(alpha=st.floats(0.1, 0.9), log_eps=st.floats(-3, -1))
def test_deflection_against_exact_solution(alpha, log_eps):
    eps = 10**log_eps
    num = rg.interior_deflection(1.0, alpha, eps).delta_theta
    assert num == pytest.approx(rg.interior_deflection_exact(1.0, alpha, eps), abs=1e-8)
