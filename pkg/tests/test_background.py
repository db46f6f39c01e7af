import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.special import lambertw

from cmaf import background as bg
from cmaf.errors import DomainError


def radius_oracle(s, sbar, r0=1.0):
    """Closed form through the principal Lambert W branch."""
    return r0 + r0 * lambertw(s / r0 * math.exp((sbar + s) / r0)).real


coords = st.tuples(st.floats(-0.9, 20.0), st.floats(-3.0, 20.0)).filter(
    lambda p: p[0] * math.exp(p[0] + p[1] + 1.0) > -0.999
)


@given(coords)
def test_radius_matches_lambert_w(p):
    s, sbar = p
    r = bg.solve_radius(s, sbar)
    assert r > 0
    assert r == pytest.approx(radius_oracle(s, sbar), rel=1e-12, abs=1e-12)


@given(coords)
def test_implicit_relation_holds(p):
    s, sbar = p
    r = bg.solve_radius(s, sbar)
    lhs = (r - 1.0) * math.exp(r - (sbar + s + 1.0))
    assert lhs == pytest.approx(s, rel=1e-12, abs=1e-13)


@given(st.floats(0.01, 20.0), st.floats(-2.0, 20.0), st.floats(0.01, 1.0))
def test_radius_increases_with_s(s, sbar, ds):
    assert bg.solve_radius(s + ds, sbar) > bg.solve_radius(s, sbar)


@given(coords, st.sampled_from([0.5, 2.0, 3.7]))
def test_homogeneity_in_r0(p, k):
    s, sbar = p
    f1 = bg.background_fields(s, sbar, 1.0)
    fk = bg.background_fields(k * s, k * sbar, k)
    assert fk.r == pytest.approx(k * f1.r, rel=1e-12)
    assert fk.omega_sq == pytest.approx(f1.omega_sq, rel=1e-12)
    assert fk.rho == pytest.approx(f1.rho / k**2, rel=1e-12)
    assert fk.hawking_mass == pytest.approx(k * f1.hawking_mass, rel=1e-12)


@given(coords)
def test_hawking_mass_is_half_r0_everywhere(p):
    f = bg.background_fields(*p)
    assert f.hawking_mass == pytest.approx(0.5, abs=1e-12)
    assert f.mu == pytest.approx(1.0 / f.r**3, rel=1e-14)
    assert f.rho == -f.mu


@pytest.mark.parametrize("s,sbar", [(0.7, 0.4), (3.0, -0.5), (-0.3, 0.2), (10.0, 10.0)])
def test_radius_derivatives_by_finite_differences(s, sbar):
    h = 1e-5
    f = bg.background_fields(s, sbar)
    d_s = (bg.solve_radius(s + h, sbar) - bg.solve_radius(s - h, sbar)) / (2 * h)
    d_sbar = (bg.solve_radius(s, sbar + h) - bg.solve_radius(s, sbar - h)) / (2 * h)
    assert f.dr_ds == pytest.approx(d_s, rel=1e-8)
    assert f.dr_dsbar == pytest.approx(d_sbar, rel=1e-8)


@pytest.mark.parametrize("s,sbar", [(0.7, 0.4), (3.0, -0.5), (-0.3, 0.2)])
def test_conformal_factor_by_finite_differences(s, sbar):
    # in this chart d_s r * d_sbar r = Omega^2 (1 - r0 / r)
    f = bg.background_fields(s, sbar)
    assert f.omega_sq == pytest.approx(f.dr_ds * f.dr_dsbar / (1 - 1 / f.r), rel=1e-12)
    assert bg.conformal_factor(s, sbar) == f.omega_sq
    pt = bg.background_point(s, sbar)
    assert (pt.r, pt.omega_sq) == (f.r, f.omega_sq)


def test_cli_examples_in_library_form():
    f = bg.background_fields(1.0, 0.0)
    assert (f.r, f.omega_sq, f.omegabar, f.rho) == (2.0, 1.0, 0.0, -0.125)
    assert bg.solve_radius(0.0, 0.3) == 1.0


def test_outgoing_axis_samples():
    for s in [k * 0.5 for k in range(1, 201)]:
        f = bg.background_fields(s, 0.0)
        assert abs(f.r - (1 + s)) <= 1e-12 * f.r
        assert abs(f.omega_sq - 1) <= 1e-12
        assert abs(f.omegabar) <= 1e-12
        assert abs(f.hawking_mass - 0.5) <= 1e-12


def test_vanishing_components_are_zero():
    f = bg.background_fields(0.4, 0.9)
    for name in bg.VANISHING_COMPONENTS:
        assert getattr(f, name) == 0.0


@pytest.mark.parametrize("s,sbar", [(-1.0, 0.0), (-2.0, 0.0), (-0.9, 3.0), (-0.0078125, 4.0), (math.nan, 0.0)])
def test_domain_errors(s, sbar):
    with pytest.raises(DomainError):
        bg.solve_radius(s, sbar)


def test_invalid_scale_rejected():
    with pytest.raises(DomainError):
        bg.background_fields(0.1, 0.1, r0=0.0)


def test_schwarzschild_params():
    p = bg.SchwarzschildParams(2.0)
    assert p.m == 1.0


@given(st.floats(-0.5, 5.0), st.floats(-0.5, 5.0))
def test_omega_sq_positive(s, sbar):
    assume(s * math.exp(s + sbar + 1) > -0.99)
    assert bg.conformal_factor(s, sbar) > 0


@given(st.floats(1e-12, 1e-2), st.floats(-5.0, 5.0), st.sampled_from([1.0, -1.0]))
def test_small_s_near_the_horizon(s, sbar, sign):
    # r - r0 is tiny here, so convergence is limited by the rounding of r
    assume(sign * s * math.exp(sign * s + sbar) > -0.99 / math.e)
    r = bg.solve_radius(sign * s, sbar)
    assert r == pytest.approx(radius_oracle(sign * s, sbar), rel=1e-14, abs=1e-15)
