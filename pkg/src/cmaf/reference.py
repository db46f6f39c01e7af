"""Closed-form reference values used by the verification suites.

Expected initial-leaf coefficients are given as functions of the degree, in
units ``r0 = 1``; multiply by ``r0 ** power`` with the power from
:data:`INITIAL_LEAF_POWERS`. Keys missing from a table entry are zero.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .sphere import eigenvalue

__all__ = ["INITIAL_LEAF_POWERS", "initial_leaf_table", "k2_exact", "energy_momentum_constants"]

INITIAL_LEAF_POWERS = {
    "lapse": 0,
    "metric": 2,
    "area_radius": 1,
    "tr_chibar": -1,
    "chibar_hat": 1,
    "chibar_trace_part": 1,
    "tr_chi_prime": -1,
    "chi_prime_hat": 1,
    "chi_prime_trace_part": 1,
    "eta": 0,
    "omegabar": -1,
    "gauss_curvature": -2,
    "gauss_curvature_gauss_eq": -2,
    "mu": -2,
    "betabar": -1,
    "rho": -2,
    "beta": -1,
}


def initial_leaf_table(case: str, l: int) -> dict[str, Fraction]:
    """Expected nonzero coefficients of the initial leaf for unit data ``Y_l r0``.

    Tensors are split as ``hat`` (coefficient of the trace-free Hessian of
    ``Y``) and ``trace_part`` (coefficient of ``Y`` round metric); covectors
    are coefficients of ``dY``.
    """
    lam = Fraction(eigenvalue(l))
    if case == "i":
        if l == 0:
            return {"lapse": Fraction(-1)}
        return {
            "tr_chibar": 2 + 2 * lam,
            "chibar_hat": Fraction(-2),
            "chibar_trace_part": 1 + lam,
            "omegabar": (3 - 3 * lam) / (2 * lam),
            "betabar": Fraction(3),
        }
    if case == "ii":
        if l == 0:
            return {
                "metric": Fraction(2),
                "area_radius": Fraction(1),
                "tr_chibar": Fraction(-2),
                "chibar_trace_part": Fraction(1),
                "tr_chi_prime": Fraction(2),
                "chi_prime_trace_part": Fraction(1),
                "gauss_curvature": Fraction(-2),
                "gauss_curvature_gauss_eq": Fraction(-2),
                "mu": Fraction(-3),
                "rho": Fraction(3),
            }
        return {
            "lapse": (3 + lam) / lam,
            "metric": Fraction(2),
            "tr_chibar": 6 / lam,
            "chibar_trace_part": (3 + 2 * lam) / lam,
            "tr_chi_prime": 2 + 2 * lam,
            "chi_prime_hat": Fraction(-2),
            "chi_prime_trace_part": 1 + lam,
            "eta": 3 / lam,
            "omegabar": 9 / (2 * lam * lam),
            "gauss_curvature": lam - 2,
            "gauss_curvature_gauss_eq": lam - 2,
            "rho": Fraction(3),
            "beta": Fraction(3),
        }
    raise ValueError(f"unknown case {case!r}")


def k2_exact() -> float:
    """``k_2 r0 = 64 - 40 e^{1/2}``."""
    return 64 - 40 * math.exp(0.5)


def energy_momentum_constants() -> tuple[float, float]:
    """``dP_i / (c_i r0)`` for the two cases: ``e^{3/2}/3 - 4/3`` and ``-e^{3/2}/2``."""
    e = math.exp(1.5)
    return e / 3 - 4 / 3, -e / 2
