"""Linearised energy-momentum at null infinity for kernel perturbations.

Background Schwarzschild values: ``N = r0`` on the limit sphere, so the Bondi
energy is ``E = (1/8 pi) * 4 pi * N = r0 / 2 = m``, the momentum vanishes and
``m_B = m``.

For a perturbation in the kernel (degrees 0 and 1) the limit metric is
conformally perturbed, ``delta g = g_1 Y round``, so the area element changes
by ``g_1 Y``. The momentum functions ``x^i`` change by some admissible
``delta x^i``; only the integral identity

    int (delta x^i + (delta dvol / dvol) x^i) dvol = 0,

from linearising ``int x^i dvol = 0``, is needed, and it removes every
``delta x^i`` term before quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import limit_deltas
from .errors import ResolutionError
from .linear_geometry import CaseKind, PerturbationCase, as_case
from .sphere import GridField, SphereGrid, first_harmonics_basis

__all__ = [
    "KernelPerturbation",
    "EnergyMomentumDelta",
    "delta_N",
    "delta_energy",
    "delta_momentum",
    "delta_bondi_mass",
    "energy_momentum",
    "momentum_surjectivity_check",
    "default_grid",
]


def default_grid() -> SphereGrid:
    # products of two degree-1 functions need degree-2 exactness
    return SphereGrid.for_degree(4)


@dataclass(frozen=True)
class KernelPerturbation:
    """``c0 + r0 * sum_i c_i x^i`` as ``delta_uf`` (case i) or ``delta_f(u=0)`` (case ii).

    ``c0`` is a length, ``c`` dimensionless.
    """

    c0: float = 0.0
    c: tuple[float, float, float] = (0.0, 0.0, 0.0)
    case: CaseKind = CaseKind.I

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        if len(self.c) != 3:
            raise ValueError("c must have three components")
        kind = as_case(self.case).kind
        object.__setattr__(self, "case", kind)


@dataclass(frozen=True)
class EnergyMomentumDelta:
    dE: float
    dP: tuple[float, float, float]
    dMB: float
    dN_coeff: float


def delta_N(case, l: int, r0: float = 1.0) -> float:
    """Coefficient of ``Y_l`` in the linearised mass function ``N`` at null infinity.

    ``delta N = -lim (3 delta_area_radius r^2 rho + r^3 delta rho)``; in terms
    of the limit metric coefficient this is ``-(3/2) g_l r0``. Case i gives
    ``[-lam (lam + 2) + lam (lam - 1) e^{3/lam}] r0``, case ii ``-3 e^{3/lam} r0``,
    and both vanish for ``l = 0``.
    """
    if l == 0:
        return 0.0
    g, _ = limit_deltas(case, l, r0)
    return -1.5 * g * r0


def _profiles(p: KernelPerturbation, grid: SphereGrid) -> tuple[np.ndarray, tuple[GridField, ...]]:
    if not grid.resolves(2):
        raise ResolutionError("energy-momentum quadrature needs a grid resolving degree 2")
    xs = first_harmonics_basis(grid)
    y1 = sum(ci * x.values for ci, x in zip(p.c, xs))
    return y1, xs


def _mode_responses(p: KernelPerturbation, r0: float) -> tuple[float, float, float, float]:
    """``(dN_0, g_0, dN_1, g_1)`` per unit ``Y`` for the constant and first modes."""
    case = PerturbationCase(p.case)
    dn0 = delta_N(case, 0, r0) * (p.c0 / r0)
    g0 = limit_deltas(case, 0, r0)[0] * (p.c0 / r0)
    return dn0, g0, delta_N(case, 1, r0), limit_deltas(case, 1, r0)[0]


def delta_energy(p: KernelPerturbation, grid: SphereGrid | None = None, r0: float = 1.0) -> float:
    """``(1/8 pi) [int delta N dvol + int N delta dvol]`` by quadrature."""
    grid = default_grid() if grid is None else grid
    y1, _ = _profiles(p, grid)
    dn0, g0, dn1, g1 = _mode_responses(p, r0)
    dN = dn0 + dn1 * y1
    d_dvol = g0 + g1 * y1
    w = grid.weights
    return (math.fsum((dN * w).ravel()) + r0 * math.fsum((d_dvol * w).ravel())) / (8 * math.pi)


def delta_momentum(p: KernelPerturbation, grid: SphereGrid | None = None,
                   r0: float = 1.0) -> tuple[float, float, float]:
    """Linearised momentum relative to the basis ``x, y, z``.

    ``delta P^i = (1/8 pi)[int N (delta x^i dvol + x^i delta dvol) + int x^i delta N dvol]``
    with ``int delta x^i dvol`` replaced through the linearised mean-zero
    condition, so no ``delta x^i`` is ever formed.
    """
    grid = default_grid() if grid is None else grid
    y1, xs = _profiles(p, grid)
    dn0, g0, dn1, g1 = _mode_responses(p, r0)
    dN = dn0 + dn1 * y1
    dvol_ratio = g0 + g1 * y1
    w = grid.weights
    out = []
    for x in xs:
        int_dx = -math.fsum((dvol_ratio * x.values * w).ravel())
        n_term = r0 * (int_dx + math.fsum((x.values * dvol_ratio * w).ravel()))
        out.append((n_term + math.fsum((x.values * dN * w).ravel())) / (8 * math.pi))
    return tuple(out)


def delta_bondi_mass(dE: float, dP=(0.0, 0.0, 0.0), energy: float | None = None,
                     momentum=(0.0, 0.0, 0.0), r0: float = 1.0) -> float:
    """Linearisation of ``sqrt(E^2 - |P|^2)`` at the Schwarzschild background.

    Only the background ``E = r0 / 2``, ``P = 0`` is supported.
    """
    energy = 0.5 * r0 if energy is None else energy
    if any(m != 0 for m in momentum) or not math.isclose(energy, 0.5 * r0, rel_tol=1e-15):
        raise ValueError("only the Schwarzschild rest-frame background is supported")
    m_b = math.sqrt(energy**2 - sum(m * m for m in momentum))
    return (energy * dE - sum(m * d for m, d in zip(momentum, dP))) / m_b


def energy_momentum(p: KernelPerturbation, grid: SphereGrid | None = None,
                    r0: float = 1.0) -> EnergyMomentumDelta:
    dE = delta_energy(p, grid, r0)
    dP = delta_momentum(p, grid, r0)
    dMB = delta_bondi_mass(dE, dP, r0=r0)
    return EnergyMomentumDelta(dE, dP, dMB, delta_N(PerturbationCase(p.case), 1, r0))


def momentum_surjectivity_check(grid: SphereGrid | None = None, case=CaseKind.I,
                                r0: float = 1.0) -> tuple[np.ndarray, int, np.ndarray]:
    """Response of ``delta P`` to ``(c0, c1, c2, c3)``.

    Returns the 3x3 matrix for unit ``c_j``, the rank of the 3x4 map that
    includes ``c0`` (with ``c0`` in units of ``r0``), and a unit null vector
    of that map.
    """
    kind = as_case(case).kind
    cols = []
    for j in range(3):
        c = [0.0, 0.0, 0.0]
        c[j] = 1.0
        cols.append(delta_momentum(KernelPerturbation(0.0, tuple(c), kind), grid, r0))
    m3 = np.array(cols).T
    c0_col = np.array(delta_momentum(KernelPerturbation(r0, (0.0, 0.0, 0.0), kind), grid, r0))
    m4 = np.column_stack([c0_col, m3])
    tol = 1e-10 * max(r0, float(np.abs(m4).max()))
    rank = int(np.linalg.matrix_rank(m4, tol=tol))
    _, _, vt = np.linalg.svd(m4)
    null = vt[-1] / np.linalg.norm(vt[-1])
    if null[np.argmax(np.abs(null))] < 0:
        null = -null
    return m3, rank, null
