"""Linearised constant-mass-aspect-function flow, one harmonic mode at a time.

The leaf shift ``F(u)`` obeys the scalar ODE ``dF/du = a(u, F)``, where the
lapse coefficient ``a`` solves the mode-``l`` projection of the linearised
lapse equation algebraically. On the background ``r = r0 + u``.

Two routes to the foliation geometry are provided: the lapse ODE (integrated
by fixed-step RK4 or evaluated in closed form) and the linearised basic
equations, which are evaluated as residuals on a state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import StepError
from .linear_geometry import (
    as_case,
    gauss_curvature_from_gauss_equation,
    gauss_curvature_from_metric,
    mode_amplitudes,
    surface_coefficients,
)
from .sphere import eigenvalue, tracefree_hessian_div_factor

__all__ = [
    "ModeState",
    "DerivedQuantities",
    "ResidualVector",
    "RESIDUAL_NAMES",
    "lapse_from_f",
    "lapse_derivative",
    "rk4_fixed",
    "evolve_mode",
    "closed_form_f",
    "closed_form_lapse",
    "closed_form_state",
    "derived_quantities",
    "strategy2_residuals",
    "gauss_delta_two_ways",
    "initial_omegabar_from_lapse",
    "convergence_order",
    "trajectory_rows",
    "TRAJECTORY_COLUMNS",
]


@dataclass(frozen=True)
class ModeState:
    u: float
    delta_f: float
    delta_a: float


@dataclass(frozen=True)
class DerivedQuantities:
    """Foliation-frame coefficients at parameter ``u`` (profiles as in
    :class:`cmaf.linear_geometry.SurfaceCoefficients`)."""

    metric: float
    area_radius: float
    tr_chibar: float
    chibar_hat: float
    tr_chi_prime: float
    chi_prime_hat: float
    eta: float
    omegabar: float
    gauss_curvature: float
    mu: float
    betabar: float
    rho: float
    beta: float
    lapse_derivative: float

    alpha = property(lambda self: 0.0)
    alphabar = property(lambda self: 0.0)
    sigma = property(lambda self: 0.0)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


RESIDUAL_NAMES = (
    "res_trchibar_prop",
    "res_trchiprime_prop",
    "res_mu_prop",
    "res_codazzi_chibar",
    "res_codazzi_chiprime",
    "res_eta_div",
    "res_eta_curl",
    "res_omegabar_elliptic",
    "res_omegabar_mean",
    "res_gauss",
)


@dataclass(frozen=True)
class ResidualVector:
    """Left-minus-right of each linearised basic equation, made dimensionless.

    Each equation is multiplied by the power of ``r`` that makes it
    dimensionless. ``relative`` holds the same residuals divided by
    ``1 + max |term|``, a measure of cancellation against the size of the
    terms that cancel.
    """

    res_trchibar_prop: float
    res_trchiprime_prop: float
    res_mu_prop: float
    res_codazzi_chibar: float
    res_codazzi_chiprime: float
    res_eta_div: float
    res_eta_curl: float
    res_omegabar_elliptic: float
    res_omegabar_mean: float
    res_gauss: float
    relative: tuple[float, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return {n: getattr(self, n) for n in RESIDUAL_NAMES}

    def max_abs(self) -> float:
        return max(abs(getattr(self, n)) for n in RESIDUAL_NAMES)


def _lapse_coeffs(l: int, u: float, r0: float) -> tuple[float, float]:
    """``(p, q)`` with ``a = p F + q A`` for ``l >= 1``."""
    lam = eigenvalue(l)
    r = r0 + u
    return 3 * r0 / (lam * r**2) + 1 / r, 3 * r0 * u / (lam * r**3) - u / r**2


def _lapse(l: int, u: float, F: float, A: float, r0: float) -> float:
    if l == 0:
        # mean condition on the lapse; independent of F
        return -r0 * A / (r0 + u) ** 2
    p, q = _lapse_coeffs(l, u, r0)
    return p * F + q * A


def _lapse_prime(l: int, u: float, F: float, A: float, a: float, r0: float) -> float:
    """Total ``d a / d u`` along the flow, ``da/du|_F + (da/dF) a``."""
    r = r0 + u
    if l == 0:
        return 2 * r0 * A / r**3
    lam = eigenvalue(l)
    p, _ = _lapse_coeffs(l, u, r0)
    dp = -6 * r0 / (lam * r**3) - 1 / r**2
    dq = 3 * r0 / lam * (1 / r**3 - 3 * u / r**4) - (1 / r**2 - 2 * u / r**3)
    return dp * F + dq * A + p * a


def lapse_from_f(u: float, delta_f: float, case, l: int, r0: float = 1.0) -> float:
    """Lapse coefficient from the mode-``l`` algebraic lapse equation."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    A, _ = mode_amplitudes(case, l, r0)
    return _lapse(l, u, delta_f, A, r0)


def lapse_derivative(u: float, delta_f: float, delta_a: float, case, l: int, r0: float = 1.0) -> float:
    """``d(delta_a)/du`` from differentiating the lapse algebra along the flow."""
    A, _ = mode_amplitudes(case, l, r0)
    return _lapse_prime(l, u, delta_f, A, delta_a, r0)


def rk4_fixed(rhs, t0: float, y0: float, t1: float, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Classical fourth-order Runge-Kutta with ``n_steps`` uniform steps."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    h = (t1 - t0) / n_steps
    ts = t0 + h * np.arange(n_steps + 1)
    ts[-1] = t1
    ys = np.empty(n_steps + 1)
    y = float(y0)
    ys[0] = y
    for j in range(n_steps):
        t = ts[j]
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h * k1 / 2)
        k3 = rhs(t + h / 2, y + h * k2 / 2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        ys[j + 1] = y
    return ts, ys


def evolve_mode(case, l: int, u_max: float, n_steps: int, r0: float = 1.0) -> list[ModeState]:
    """RK4 trajectory of ``dF/du = a(u, F)`` from the case's initial leaf.

    Raises
    ------
    StepError
        If the step ``u_max / n_steps`` exceeds ``r0``.
    """
    if u_max < 0:
        raise ValueError("u_max must be nonnegative")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    A, F0 = mode_amplitudes(case, l, r0)
    if u_max == 0:
        return [ModeState(0.0, F0, _lapse(l, 0.0, F0, A, r0))]
    if u_max / n_steps > r0:
        raise StepError(f"step {u_max / n_steps!r} exceeds r0 = {r0!r}; use more steps")
    ts, ys = rk4_fixed(lambda t, y: _lapse(l, t, y, A, r0), 0.0, F0, u_max, n_steps)
    return [ModeState(float(t), float(y), _lapse(l, float(t), float(y), A, r0)) for t, y in zip(ts, ys)]


# closed forms

def _expo(l: int, r: float, r0: float) -> tuple[float, float]:
    """``E - 1`` and ``E`` for ``E = exp(3 (1 - r0/r) / lambda)``."""
    x = 3 / eigenvalue(l) * (1 - r0 / r)
    em1 = math.expm1(x)
    return em1, em1 + 1


def _f_case_i(l: int, u: float, r0: float) -> float:
    r = r0 + u
    if l == 0:
        return -r0 * u / r
    lam = eigenvalue(l)
    em1, _ = _expo(l, r, r0)
    # (r/3) lam [(lam + 2) - (lam - 1) E] - r0 (lam + 1) + r0^2 / r, grouped so the
    # leading lam^2 terms cancel analytically
    return r / 3 * lam * (3 - (lam - 1) * em1) - r0 * (lam + 1) + r0 * r0 / r


def _f_case_ii(l: int, u: float, r0: float) -> float:
    if l == 0:
        return r0
    r = r0 + u
    return r * _expo(l, r, r0)[1]


def closed_form_f(case, l: int, u: float, r0: float = 1.0) -> float:
    """Exact ``F(u)`` for the case's initial data."""
    if u < 0:
        raise ValueError("u must be nonnegative")
    A, F0 = mode_amplitudes(case, l, r0)
    out = 0.0
    if A:
        out += A / r0 * _f_case_i(l, u, r0)
    if F0:
        out += F0 / r0 * _f_case_ii(l, u, r0)
    return out


def closed_form_lapse(case, l: int, u: float, r0: float = 1.0) -> float:
    """Exact lapse coefficient along the closed-form trajectory."""
    A, F0 = mode_amplitudes(case, l, r0)
    r = r0 + u
    out = 0.0
    if l == 0:
        return -r0 * A / r**2
    lam = eigenvalue(l)
    em1, e = _expo(l, r, r0)
    if A:
        # derivative of the case-i closed form
        a_i = lam / 3 * (3 - (lam - 1) * em1) - (lam - 1) * r0 / r * e - r0 * r0 / r**2
        out += A / r0 * a_i
    if F0:
        out += F0 / r0 * (3 * r0 / (lam * r) + 1) * e
    return out


def closed_form_state(case, l: int, u: float, r0: float = 1.0) -> ModeState:
    """State on the exact trajectory; the lapse is re-solved from ``F``."""
    f = closed_form_f(case, l, u, r0)
    return ModeState(u, f, lapse_from_f(u, f, case, l, r0))


# derived geometry

def derived_quantities(case, l: int, u: float, delta_f: float, delta_a: float,
                       r0: float = 1.0) -> DerivedQuantities:
    """Linearised leaf geometry at ``u`` from the state ``(delta_f, delta_a)``.

    ``omegabar = (1/2) d(delta_a)/du + (linearised hypersurface omegabar)``,
    with the lapse derivative taken from the lapse algebra.
    """
    A, _ = mode_amplitudes(case, l, r0)
    r = r0 + u
    a_prime = _lapse_prime(l, u, delta_f, A, delta_a, r0)
    omegabar = 0.5 * a_prime - r0 / r**3 * A
    sc = surface_coefficients(l, u, delta_f, A, delta_a, omegabar, r0)
    return DerivedQuantities(
        metric=sc.metric,
        area_radius=sc.area_radius,
        tr_chibar=sc.tr_chibar,
        chibar_hat=sc.chibar_hat,
        tr_chi_prime=sc.tr_chi_prime,
        chi_prime_hat=sc.chi_prime_hat,
        eta=sc.eta,
        omegabar=sc.omegabar,
        gauss_curvature=sc.gauss_curvature,
        mu=sc.mu,
        betabar=sc.betabar,
        rho=sc.rho,
        beta=sc.beta,
        lapse_derivative=a_prime,
    )


def initial_omegabar_from_lapse(case, l: int, r0: float = 1.0) -> float:
    """``omegabar`` at ``u = 0`` via the lapse derivative of the flow."""
    st = closed_form_state(case, l, 0.0, r0)
    return derived_quantities(case, l, 0.0, st.delta_f, st.delta_a, r0).omegabar


def _u_derivatives(l: int, u: float, F: float, A: float, a: float, a_prime: float,
                   r0: float) -> tuple[float, float, float]:
    """``d/du`` of ``tr chibar``, ``tr chi'`` and ``mu`` along the flow, using ``F' = a``."""
    lam = eigenvalue(l)
    r = r0 + u
    Fp = a
    d_trchibar = (
        -2 * Fp / r**2 + 4 * F / r**3
        + (4 / r**3 - 12 * r0 / r**4 - 4 * lam / r**3) * A
        + 2 * a_prime / r - 2 * a / r**2
    )
    d_trchiprime = (
        2 * (r0 - u) / r**3 * Fp + (-2 / r**3 - 6 * (r0 - u) / r**4) * F
        - (4 * u / r**4 - 8 * u * u / r**5) * A
        + 2 * lam * Fp / r**2 - 4 * lam * F / r**3
        - 2 * a / r**2 - 2 * u * a_prime / r**2 + 4 * u * a / r**3
    )
    # mu = K - tr chi' / (2r) - u tr chibar / (2 r^2) + lambda eta / r^2
    tr_chibar = -2 * F / r**2 - (2 * r - 4 * r0) / r**3 * A + 2 * lam / r**2 * A + 2 * a / r
    tr_chiprime = 2 * (r0 - u) / r**3 * F - 2 * u * u / r**4 * A + 2 * lam / r**2 * F - 2 * u * a / r**2
    d_K = (lam - 2) * (Fp / r**3 - 3 * F / r**4 + A / r**4 - 4 * u * A / r**5)
    if l == 0:
        d_div = 0.0
    else:
        eta = a + u * A / r**2 - F / r
        d_eta = a_prime + A / r**2 - 2 * u * A / r**3 - Fp / r + F / r**2
        d_div = lam * (d_eta / r**2 - 2 * eta / r**3)
    d_mu = (
        d_K
        - (d_trchiprime / (2 * r) - tr_chiprime / (2 * r**2))
        - (tr_chibar / (2 * r**2) + u * d_trchibar / (2 * r**2) - u * tr_chibar / r**3)
        + d_div
    )
    return d_trchibar, d_trchiprime, d_mu


def _balance(lhs_terms: list[float], rhs_terms: list[float]) -> tuple[float, float]:
    """``(lhs - rhs, (lhs - rhs) / (1 + max |term|))``."""
    res = math.fsum(lhs_terms) - math.fsum(rhs_terms)
    scale = 1.0 + max(abs(t) for t in lhs_terms + rhs_terms)
    return res, res / scale


def strategy2_residuals(case, l: int, u: float, state: ModeState, r0: float = 1.0) -> ResidualVector:
    """Residuals of the linearised basic equations on a flow state.

    Equations, reduced to mode ``l`` (``lambda = l(l+1)``, ``c = 1 - lambda/2``):

    - d/du tr chibar = (4/r) w - (2/r) tr chibar
    - d/du tr chi' = -4 (r - r0)/r^2 w - tr chi'/r - (r - r0)/r^2 tr chibar + 2 mu
    - d/du mu = -(3/r) mu - (3 r0 / 2 r^3) mean(tr chibar)
    - Codazzi, incoming: c chibar_hat = (r^2/2) tr chibar - r eta - r^2 betabar
    - Codazzi, outgoing: c chi'_hat = (r^2/2) tr chi' + (r - r0) eta - r^2 beta
    - -lambda eta = -r^2 rho - r^2 mu; curl eta = 0
    - -lambda w = -(3 r0 / 4 r)(tr chibar - mean) + lambda betabar, and mean(w) = 0
    - K = -rho + (r - r0)/(2 r^2) tr chibar + tr chi'/(2 r)

    Here ``w`` is the omegabar coefficient. Covector equations compare
    coefficients of ``dY_l`` and are void for ``l = 0``.
    """
    if not math.isclose(state.u, u, rel_tol=0, abs_tol=1e-12 * max(1.0, abs(u))):
        raise ValueError("state.u does not match u")
    A, _ = mode_amplitudes(case, l, r0)
    lam = eigenvalue(l)
    r = r0 + u
    F, a = state.delta_f, state.delta_a
    d = derived_quantities(case, l, u, F, a, r0)
    dtb, dtp, dmu = _u_derivatives(l, u, F, A, a, d.lapse_derivative, r0)
    mean_trchibar = d.tr_chibar if l == 0 else 0.0
    ctf = tracefree_hessian_div_factor(l)
    r2 = r * r
    out = []
    out.append(_balance([r2 * dtb], [4 * r * d.omegabar, -2 * r * d.tr_chibar]))
    out.append(_balance(
        [r2 * dtp],
        [-4 * (r - r0) * d.omegabar, -r * d.tr_chi_prime, -(r - r0) * d.tr_chibar, 2 * r2 * d.mu],
    ))
    out.append(_balance([r**3 * dmu], [-3 * r2 * d.mu, -1.5 * r0 * mean_trchibar]))
    if l == 0:
        out.append((0.0, 0.0))
        out.append((0.0, 0.0))
    else:
        out.append(_balance(
            [ctf * d.chibar_hat / r],
            [0.5 * r * d.tr_chibar, -d.eta, -r * d.betabar],
        ))
        out.append(_balance(
            [ctf * d.chi_prime_hat / r],
            [0.5 * r * d.tr_chi_prime, (r - r0) / r * d.eta, -r * d.beta],
        ))
    out.append(_balance([-lam * d.eta], [-r2 * d.rho, -r2 * d.mu]))
    # the curl of a gradient vanishes identically
    out.append((0.0, 0.0))
    if l == 0:
        out.append((0.0, 0.0))
        out.append(_balance([r * d.omegabar], [0.0]))
    else:
        out.append(_balance(
            [-lam * r * d.omegabar],
            [-0.75 * r0 * (d.tr_chibar - mean_trchibar), lam * r * d.betabar],
        ))
        out.append((0.0, 0.0))
    out.append(_balance(
        [r2 * d.gauss_curvature],
        [-r2 * d.rho, 0.5 * (r - r0) * d.tr_chibar, 0.5 * r * d.tr_chi_prime],
    ))
    return ResidualVector(*(x[0] for x in out), relative=tuple(x[1] for x in out))


def gauss_delta_two_ways(case, l: int, u: float, state: ModeState, r0: float = 1.0) -> tuple[float, float]:
    """``delta K`` from the metric variation and from the Gauss equation."""
    A, _ = mode_amplitudes(case, l, r0)
    d = derived_quantities(case, l, u, state.delta_f, state.delta_a, r0)
    k_metric = gauss_curvature_from_metric(l, u, state.delta_f, A, r0)
    k_gauss = gauss_curvature_from_gauss_equation(u, d.tr_chibar, d.tr_chi_prime, d.rho, r0)
    return k_metric, k_gauss


TRAJECTORY_COLUMNS = (
    ("u", "delta_f", "delta_a")
    + tuple(f.name for f in fields(DerivedQuantities))
    + ("closed_form_f", "closed_form_a", "max_residual")
)


def trajectory_rows(case, l: int, states: list[ModeState], r0: float = 1.0) -> list[tuple[float, ...]]:
    """One row per state in :data:`TRAJECTORY_COLUMNS` order."""
    case = as_case(case)
    rows = []
    for st in states:
        d = derived_quantities(case, l, st.u, st.delta_f, st.delta_a, r0)
        res = strategy2_residuals(case, l, st.u, st, r0)
        rows.append(
            (st.u, st.delta_f, st.delta_a)
            + tuple(d.as_dict().values())
            + (closed_form_f(case, l, st.u, r0), closed_form_lapse(case, l, st.u, r0), res.max_abs())
        )
    return rows


def convergence_order(case, l: int, u_max: float, base_steps: int = 64, halvings: int = 4,
                      r0: float = 1.0) -> float | None:
    """Least-squares order of the RK4 end-point error over successive step halvings.

    Returns ``None`` when every error is exactly zero (the integrator is exact
    for a constant solution).
    """
    exact = closed_form_f(case, l, u_max, r0)
    ns = [base_steps * 2**k for k in range(halvings + 1)]
    errs = [abs(evolve_mode(case, l, u_max, n, r0)[-1].delta_f - exact) for n in ns]
    if max(errs) == 0.0:
        return None
    if min(errs) == 0.0:
        raise ValueError("error reached zero at finite step; cannot fit an order")
    slope = np.polyfit(np.log2(ns), np.log2(errs), 1)[0]
    return float(-slope)
