"""Renormalised geometry of the linearised foliation and its limit at null infinity.

Along the flow the renormalised metric ``g / r^2`` and Gauss curvature
``r^2 K`` have linearised coefficients

    g_u = metric / r^2 - 2 area_radius / r,
    k_u = r^2 K + 2 area_radius / r,

and their ``u -> infinity`` limits define two diagonal maps on harmonics. For
input ``Y_l r0`` the curvature map has eigenvalue ``k_l`` with

    k_l r0 = (lambda - 2) / 2 * g_l,

which vanishes exactly on degrees 0 and 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cmaf_flow import ModeState, closed_form_state, derived_quantities
from .linear_geometry import CaseKind, as_case, mode_amplitudes
from .sphere import GridField, SpectralField, analyze, eigenvalue, synthesize

__all__ = [
    "SpectrumEntry",
    "RenormalizedDelta",
    "renormalized_deltas",
    "limit_deltas",
    "spectrum",
    "asymptote_check",
    "kernel_certificate",
    "apply_limit_map",
    "SPECTRUM_COLUMNS",
    "spectrum_rows",
]


@dataclass(frozen=True)
class SpectrumEntry:
    """Limit eigendata of one degree for input ``Y_l r0``.

    ``g_coeff`` and ``k_coeff_r0`` refer to the case ``i`` data (tilted
    incoming hypersurface); the ``_case_ii`` fields to the shifted leaf.
    """

    l: int
    lam: int
    g_coeff: float
    k_coeff_r0: float
    g_case_ii: float
    k_case_ii_r0: float

    @property
    def in_kernel(self) -> bool:
        return self.l <= 1

    @property
    def k_over_lambda(self) -> float:
        return 0.0 if self.l == 0 else self.k_coeff_r0 / self.lam


@dataclass(frozen=True)
class RenormalizedDelta:
    u: float
    g_u: float
    k_u: float


def renormalized_deltas(case, l: int, u: float, state: ModeState | None = None,
                        r0: float = 1.0) -> RenormalizedDelta:
    """Renormalised metric and curvature coefficients at ``u``.

    Uses the exact trajectory unless a ``state`` is given.
    """
    if u < 0:
        raise ValueError("u must be nonnegative")
    if state is None:
        state = closed_form_state(case, l, u, r0)
    d = derived_quantities(case, l, u, state.delta_f, state.delta_a, r0)
    r = r0 + u
    if l == 0:
        # both combinations cancel identically for a radial shift
        return RenormalizedDelta(u, 0.0, 0.0)
    g_u = d.metric / r**2 - 2 * d.area_radius / r
    k_u = r**2 * d.gauss_curvature + 2 * d.area_radius / r
    return RenormalizedDelta(u, g_u, k_u)


def _g_limit_case_i(l: int) -> float:
    lam = eigenvalue(l)
    # (2/3) [lam (lam + 2) - lam (lam - 1) e^{3/lam}] as (2/3) lam sum_n (n - 2) x^n / (n + 1)!
    # with x = 3/lam; only the n = 1 term is negative, so nothing cancels
    x = 3.0 / lam
    terms = [-x / 2]
    term = x / 2  # x^n / (n + 1)! at n = 1
    n = 1
    while True:
        n += 1
        term *= x / (n + 1)
        terms.append((n - 2) * term)
        if term * n < 1e-18 * x:
            break
    return 2.0 / 3.0 * lam * math.fsum(terms)


def _g_limit_case_ii(l: int) -> float:
    return 2 * math.exp(3 / eigenvalue(l))


def limit_deltas(case, l: int, r0: float = 1.0) -> tuple[float, float]:
    """``(g_coeff, k_coeff_r0)`` at null infinity for the case's initial data.

    Linear in the amplitudes; the unit cases carry amplitude ``r0``.
    """
    if l < 0:
        raise ValueError("degree must be nonnegative")
    if l == 0:
        return 0.0, 0.0
    A, F0 = mode_amplitudes(case, l, r0)
    g = 0.0
    if A:
        g += A / r0 * _g_limit_case_i(l)
    if F0:
        g += F0 / r0 * _g_limit_case_ii(l)
    if l == 1:
        return g, 0.0
    return g, (eigenvalue(l) - 2) / 2 * g


def spectrum(l_max: int) -> list[SpectrumEntry]:
    """Limit eigendata for ``l = 0 .. l_max``."""
    if l_max < 1:
        raise ValueError("l_max must be at least 1")
    out = []
    for l in range(l_max + 1):
        g1, k1 = limit_deltas(CaseKind.I, l)
        g2, k2 = limit_deltas(CaseKind.II, l)
        out.append(SpectrumEntry(l, eigenvalue(l), g1, k1, g2, k2))
    return out


def asymptote_check(l_max: int, l_min: int = 2) -> float:
    """``max |k_l / lambda_l + 1/(2 r0)| lambda_l r0`` over ``l_min <= l <= l_max``.

    The expansion ``k_l r0 / lambda = -1/2 + 1/lambda + 3/(8 lambda^2) + ...``
    makes this tend to 1 from above.
    """
    if l_max < 2 or l_min < 2 or l_min > l_max:
        raise ValueError("need 2 <= l_min <= l_max")
    worst = 0.0
    for e in spectrum(l_max)[l_min:]:
        worst = max(worst, abs(e.k_coeff_r0 / e.lam + 0.5) * e.lam)
    return worst


def kernel_certificate(l_max: int) -> tuple[bool, float]:
    """Finite check of invertibility off the kernel.

    Returns whether every ``k_l`` with ``2 <= l <= l_max`` is nonzero, and
    ``min |k_l r0| / lambda_l`` over that range.
    """
    ks = [(e.k_coeff_r0, e.lam) for e in spectrum(max(l_max, 2))[2:]]
    return all(k != 0 for k, _ in ks), min(abs(k) / lam for k, lam in ks)


def apply_limit_map(field: GridField, l_max: int, which: str = "k", case="i",
                    r0: float = 1.0) -> GridField:
    """Apply the diagonal limit map to a grid profile (a length-valued ``delta_uf``
    or ``delta_f``, depending on the case).

    ``which`` selects ``"g"`` (dimensionless output) or ``"k"`` (1/length).
    """
    case = as_case(case)
    if which not in ("g", "k"):
        raise ValueError("which must be 'g' or 'k'")
    coeffs = analyze(field, l_max)
    out = np.array(coeffs.coeffs)
    for l in range(l_max + 1):
        g, k = limit_deltas(case, l, r0)
        factor = (g if which == "g" else k / r0) / r0
        out[l * l:(l + 1) ** 2] *= factor
    return synthesize(SpectralField(l_max, out), field.grid)


SPECTRUM_COLUMNS = ("l", "lambda", "g_caseI", "k_caseI_r0", "g_caseII", "k_caseII_r0", "k_over_lambda")


def spectrum_rows(l_max: int) -> list[tuple[float, ...]]:
    """Dimensionless eigendata: ``g`` for input ``Y_l r0``, ``k_l r0`` and ``k_l r0 / lambda``."""
    return [
        (e.l, e.lam, e.g_coeff, e.k_coeff_r0, e.g_case_ii, e.k_case_ii_r0, e.k_over_lambda)
        for e in spectrum(l_max)
    ]
