import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmaf import asymptotics as asy
from cmaf import sphere as sp
from cmaf.cmaf_flow import evolve_mode
from cmaf.reference import k2_exact


def test_k2_and_k3_closed_forms():
    entries = asy.spectrum(3)
    assert entries[2].k_coeff_r0 == pytest.approx(k2_exact(), rel=1e-13)
    assert k2_exact() == pytest.approx(64 - 40 * math.exp(0.5), rel=1e-15)
    # lambda = 12: 5 g_3 with g_3 = 8 [14 - 11 e^{1/4}]
    assert entries[3].k_coeff_r0 == pytest.approx(5 * 8 * (14 - 11 * math.exp(0.25)), rel=1e-12)


def test_first_mode_metric_coefficient():
    g, k = asy.limit_deltas("i", 1)
    assert g == pytest.approx(16 / 3 - 4 / 3 * math.exp(1.5), rel=1e-14)
    assert k == 0.0
    assert asy.limit_deltas("i", 0) == (0.0, 0.0)


def test_renormalized_values():
    d = asy.renormalized_deltas("ii", 2, 1.0)
    assert (d.g_u, d.k_u) == pytest.approx((2 * math.exp(0.25), 4 * math.exp(0.25)), rel=1e-13)
    z = asy.renormalized_deltas("i", 1, 0.0)
    assert z.g_u == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        asy.renormalized_deltas("i", 1, -1.0)


@pytest.mark.parametrize("case", ["i", "ii"])
@pytest.mark.parametrize("l", [1, 2, 3, 7])
def test_renormalized_values_approach_the_limit(case, l):
    g_lim, k_lim = asy.limit_deltas(case, l)
    for u in (1e4, 1e6):
        d = asy.renormalized_deltas(case, l, u)
        assert abs(d.g_u - g_lim) <= 40 * (1 + abs(g_lim)) * l * l / u
        assert abs(d.k_u - k_lim) <= 40 * (1 + abs(k_lim)) * l**4 / u


def test_rk4_state_gives_the_same_renormalised_data():
    st_ = evolve_mode("i", 3, 50.0, 4096)[-1]
    a = asy.renormalized_deltas("i", 3, 50.0, st_)
    b = asy.renormalized_deltas("i", 3, 50.0)
    assert a.k_u == pytest.approx(b.k_u, rel=1e-9)


@pytest.mark.parametrize("l", [10, 20, 40])
def test_large_degree_expansion(l):
    lam = l * (l + 1)
    k_over = asy.spectrum(l)[l].k_over_lambda
    assert abs(k_over - (-0.5 + 1 / lam + 3 / (8 * lam**2))) <= 2 / lam**3


def test_asymptote_and_kernel_certificate():
    assert 1.0 < asy.asymptote_check(40) < 1.1
    ok, margin = asy.kernel_certificate(60)
    assert ok and margin > 0.3
    with pytest.raises(ValueError):
        asy.asymptote_check(1)


@given(st.integers(2, 200))
def test_shifted_leaf_eigenvalues_are_positive(l):
    lam = l * (l + 1)
    e = asy.spectrum(l)[l]
    assert e.k_case_ii_r0 == pytest.approx((lam - 2) * math.exp(3 / lam), rel=1e-13)
    assert e.k_case_ii_r0 > 0 and e.k_coeff_r0 < 0


@given(st.integers(2, 60))
def test_case_i_expm1_form_matches_direct_form(l):
    lam = l * (l + 1)
    direct = 2 / 3 * (lam * (lam + 2) - lam * (lam - 1) * math.exp(3 / lam))
    # the direct form loses about lam^2 ulps to cancellation
    assert asy.spectrum(l)[l].g_coeff == pytest.approx(direct, abs=8 * lam**2 * 2.2e-16)


@pytest.mark.parametrize("l", [2, 10, 100, 1000])
def test_case_i_metric_coefficient_in_high_precision(l):
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    lam = l * (l + 1)
    exact = mpmath.mpf(2) / 3 * (lam * (lam + 2) - lam * (lam - 1) * mpmath.exp(mpmath.mpf(3) / lam))
    assert asy.spectrum(l)[l].g_coeff == pytest.approx(float(exact), rel=1e-12)


def test_limit_map_kills_the_kernel():
    grid = sp.SphereGrid.for_degree(6)
    f = sp.GridField.from_function(
        grid, lambda t, p: 0.7 + sp.real_harmonic(1, 1, t, p) + 0.5 * sp.real_harmonic(3, -2, t, p))
    out = asy.apply_limit_map(f, 6, "k")
    c = sp.analyze(out, 6)
    assert np.abs(c.coeffs[:4]).max() < 1e-13
    assert c[3, -2] == pytest.approx(0.5 * asy.limit_deltas("i", 3)[1], rel=1e-12)
    g = sp.analyze(asy.apply_limit_map(f, 6, "g"), 6)
    assert g[1, 1] == pytest.approx(asy.limit_deltas("i", 1)[0], rel=1e-12)
    with pytest.raises(ValueError):
        asy.apply_limit_map(f, 6, "x")


def test_spectrum_rows_layout():
    rows = asy.spectrum_rows(5)
    assert len(rows) == 6 and all(len(r) == len(asy.SPECTRUM_COLUMNS) for r in rows)
    assert rows[0][6] == 0.0 and rows[1][3] == 0.0
    assert rows[2][1] == 6 and rows[2][3] == pytest.approx(k2_exact(), rel=1e-13)
    with pytest.raises(ValueError):
        asy.spectrum(0)
