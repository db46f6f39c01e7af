import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmaf import bondi as bd
from cmaf.errors import ResolutionError
from cmaf.reference import energy_momentum_constants
from cmaf.sphere import SphereGrid

C_I, C_II = energy_momentum_constants()
components = st.floats(-3, 3)


def test_delta_n_examples():
    assert bd.delta_N("i", 1) == pytest.approx(2 * math.exp(1.5) - 8, rel=1e-13)
    assert bd.delta_N("i", 1) == pytest.approx(0.9633781, abs=1e-7)
    assert bd.delta_N("i", 0) == 0.0 and bd.delta_N("ii", 0) == 0.0
    assert bd.delta_N("ii", 2) == pytest.approx(-3 * math.exp(0.5), rel=1e-14)


@given(st.integers(1, 40), st.sampled_from([0.5, 1.0, 3.0]))
def test_delta_n_general_formula(l, r0):
    lam = l * (l + 1)
    case_i = (-lam * (lam + 2) + lam * (lam - 1) * math.exp(3 / lam)) * r0
    assert bd.delta_N("i", l, r0) == pytest.approx(case_i, rel=1e-9, abs=1e-9 * r0)
    assert bd.delta_N("ii", l, r0) == pytest.approx(-3 * math.exp(3 / lam) * r0, rel=1e-13)


def test_momentum_constants():
    assert C_I == pytest.approx(math.exp(1.5) / 3 - 4 / 3, rel=1e-15)
    assert C_I == pytest.approx(0.1605630, abs=1e-7)
    assert C_II == pytest.approx(-2.2408445, abs=1e-7)


@given(st.sampled_from(["i", "ii"]), components, components, components, components,
       st.sampled_from([1.0, 2.0, 0.37]))
def test_energy_and_mass_vanish_and_momentum_is_linear(case, c0, c1, c2, c3, r0):
    em = bd.energy_momentum(bd.KernelPerturbation(c0 * r0, (c1, c2, c3), case), r0=r0)
    scale = r0 * (1 + abs(c0) + abs(c1) + abs(c2) + abs(c3))
    assert abs(em.dE) <= 1e-12 * scale
    assert abs(em.dMB) <= 1e-12 * scale
    const = C_I if case == "i" else C_II
    assert np.allclose(em.dP, [const * c * r0 for c in (c1, c2, c3)], rtol=0, atol=1e-12 * scale)


def test_constant_only_perturbation_has_no_charges():
    em = bd.energy_momentum(bd.KernelPerturbation(1.0, (0, 0, 0)))
    assert abs(em.dE) <= 1e-15 and max(abs(x) for x in em.dP) <= 1e-15


def test_doubling_c_doubles_momentum_and_keeps_energy_zero():
    a = bd.energy_momentum(bd.KernelPerturbation(0.0, (1, 0, 0)))
    b = bd.energy_momentum(bd.KernelPerturbation(0.0, (2, 0, 0)))
    assert b.dP[0] == pytest.approx(2 * a.dP[0], rel=1e-14)
    assert abs(b.dE) <= 1e-12


def test_bondi_mass_chain_rule():
    assert bd.delta_bondi_mass(0.25, (1.0, 2.0, 3.0)) == 0.25
    assert bd.delta_bondi_mass(0.1, r0=2.0) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        bd.delta_bondi_mass(0.1, momentum=(0.1, 0.0, 0.0))
    with pytest.raises(ValueError):
        bd.delta_bondi_mass(0.1, energy=0.7)


def test_coarse_grid_rejected():
    with pytest.raises(ResolutionError):
        bd.delta_momentum(bd.KernelPerturbation(0.0, (1, 0, 0)), SphereGrid(2, 3))


def test_perturbation_validation():
    with pytest.raises(ValueError):
        bd.KernelPerturbation(0.0, (1.0, 2.0))
    with pytest.raises(ValueError):
        bd.KernelPerturbation(0.0, (1, 0, 0), "mixed")
    assert bd.KernelPerturbation(case="II").case is bd.CaseKind.II


@pytest.mark.parametrize("case,const", [("i", C_I), ("ii", C_II)])
@pytest.mark.parametrize("r0", [1.0, 2.0])
def test_surjectivity_and_kernel(case, const, r0):
    m3, rank, null = bd.momentum_surjectivity_check(case=case, r0=r0)
    assert np.abs(m3 - const * r0 * np.eye(3)).max() <= 1e-12 * r0
    assert rank == 3
    assert np.allclose(null, [1, 0, 0, 0], atol=1e-12)


def test_finer_grid_gives_same_momentum():
    p = bd.KernelPerturbation(0.2, (0.3, -1.0, 0.5), "ii")
    assert np.allclose(bd.delta_momentum(p), bd.delta_momentum(p, SphereGrid.for_degree(12)),
                       rtol=0, atol=1e-13)
