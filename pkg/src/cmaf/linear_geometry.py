"""Mode-wise linearised geometry of surfaces on the outgoing cone ``sbar = 0``.

A perturbed surface is described by two functions on the sphere: ``delta_f``,
the shift in ``s`` along the incoming null hypersurface, and ``delta_uf``, the
shift in ``sbar`` that tilts that hypersurface. For a single mode both are
multiples of ``Y_l``:

    delta_f  = F * Y_l,        delta_uf = A * Y_l,

with ``F`` and ``A`` carrying units of length. Every linearised quantity is
stored as a scalar coefficient against one of four angular profiles:

    scalar    Y_l                 (traces, lapse, curvature scalars)
    covector  dY_l                (torsion, beta, betabar, shift)
    conformal Y_l * round metric  (metric)
    tracefree tracefree Hessian of Y_l (shears)

Background radius on the cone is ``r = r0 + s``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum

from .sphere import eigenvalue

__all__ = [
    "CaseKind",
    "PerturbationCase",
    "CASE_I",
    "CASE_II",
    "as_case",
    "mode_amplitudes",
    "SurfaceCoefficients",
    "LinearizedHypersurfaceGeometry",
    "InitialLeafState",
    "surface_coefficients",
    "linearized_hypersurface_coeffs",
    "initial_lapse",
    "initial_omegabar_elliptic",
    "initial_leaf_state",
    "gauss_curvature_from_metric",
    "gauss_curvature_from_gauss_equation",
]


class CaseKind(str, Enum):
    I = "i"
    II = "ii"
    MIXED = "mixed"


@dataclass(frozen=True)
class PerturbationCase:
    """Initial data of a linearised perturbation of the initial leaf.

    ``CaseI``: the leaf stays put on the cone, the incoming hypersurface tilts,
    ``delta_f(u=0) = 0`` and ``delta_uf = Y_l r0``.
    ``CaseII``: the leaf moves along the cone, ``delta_f(u=0) = Y_l r0`` and
    ``delta_uf = 0``.
    ``Mixed``: any linear combination, given as ``(l, amp_i, amp_ii)`` triples
    where ``amp_i`` multiplies ``Y_l`` in ``delta_uf`` and ``amp_ii`` multiplies
    ``Y_l`` in ``delta_f(u=0)`` (both lengths).
    """

    kind: CaseKind
    components: tuple[tuple[int, float, float], ...] = ()

    @classmethod
    def mixed(cls, components) -> PerturbationCase:
        comps = tuple((int(l), float(ai), float(aii)) for l, ai, aii in components)
        for l, _, _ in comps:
            if l < 0:
                raise ValueError(f"degree must be nonnegative, got {l}")
        return cls(CaseKind.MIXED, comps)

    @property
    def label(self) -> str:
        return self.kind.value


CASE_I = PerturbationCase(CaseKind.I)
CASE_II = PerturbationCase(CaseKind.II)


def as_case(case) -> PerturbationCase:
    """Accept a :class:`PerturbationCase`, a :class:`CaseKind` or ``"i"`` / ``"ii"``."""
    if isinstance(case, PerturbationCase):
        return case
    kind = CaseKind(case.lower() if isinstance(case, str) else case)
    if kind is CaseKind.MIXED:
        raise ValueError("mixed cases need explicit components")
    return PerturbationCase(kind)


def mode_amplitudes(case, l: int, r0: float = 1.0) -> tuple[float, float]:
    """``(A, F0)``: coefficients of ``Y_l`` in ``delta_uf`` and ``delta_f(u=0)``."""
    case = as_case(case)
    # 0 * r0 keeps exact arithmetic exact when r0 is a Fraction
    if case.kind is CaseKind.I:
        return r0, 0 * r0
    if case.kind is CaseKind.II:
        return 0 * r0, r0
    a = sum(ai for ll, ai, _ in case.components if ll == l)
    f0 = sum(aii for ll, _, aii in case.components if ll == l)
    return float(a), float(f0)


@dataclass(frozen=True)
class SurfaceCoefficients:
    """Linearised geometry of a leaf in the foliation frame, one mode.

    Profiles: ``metric`` conformal; ``chibar_hat`` and ``chi_prime_hat``
    tracefree; ``eta``, ``betabar``, ``beta`` covector; the rest scalar. The
    ``*_trace_part`` fields are the conformal parts of the full second
    fundamental forms, ``(1/2) d(tr chi) r^2 + (1/2) tr chi d(metric)``.
    """

    lapse: float
    metric: float
    area_radius: float
    tr_chibar: float
    chibar_hat: float
    chibar_trace_part: float
    tr_chi_prime: float
    chi_prime_hat: float
    chi_prime_trace_part: float
    eta: float
    omegabar: float
    gauss_curvature: float
    mu: float
    betabar: float
    rho: float
    beta: float

    # identically vanishing components
    alpha = property(lambda self: 0.0)
    alphabar = property(lambda self: 0.0)
    sigma = property(lambda self: 0.0)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class LinearizedHypersurfaceGeometry:
    """Linearised geometry of the tilted incoming hypersurface and of a leaf in it.

    Fields ending in ``_h`` belong to the hypersurface frame; ``_s`` to the
    leaf in the frame adapted to the hypersurface (no lapse). Covector
    profiles: ``shift``, ``epsbar_vec``, ``eps_prime_vec``, ``eta_h``,
    ``betabar_h``, ``eta_s``, ``beta_s``. ``chibar_hat_h`` is tracefree.
    """

    s: float
    r: float
    shift: float
    epsbar: float
    epsbar_vec: float
    eps_prime: float
    eps_prime_vec: float
    area_radius: float
    metric: float
    tr_chi_prime_h: float
    tr_chibar_h: float
    chibar_hat_h: float
    eta_h: float
    omegabar_h: float
    betabar_h: float
    rho_h: float
    tr_chi_prime_s: float
    eta_s: float
    beta_s: float

    alphabar_h = property(lambda self: 0.0)
    sigma_h = property(lambda self: 0.0)
    beta_h = property(lambda self: 0.0)
    alpha_h = property(lambda self: 0.0)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _hypersurface(l: int, s: float, F: float, A: float, r0: float) -> LinearizedHypersurfaceGeometry:
    lam = eigenvalue(l)
    r = r0 + s
    # gradients of a constant vanish
    vec = 0 if l == 0 else 1
    return LinearizedHypersurfaceGeometry(
        s=s,
        r=r,
        shift=vec * (-2 * A / r**2),
        epsbar=0 * r0,
        epsbar_vec=vec * (-2 * A / r**2),
        eps_prime=0 * r0,
        eps_prime_vec=vec * (-2 * F / r**2),
        area_radius=F + s / r * A,
        metric=2 * (r * F + s * A),
        tr_chi_prime_h=2 * (r0 - s) / r**3 * F - 2 * s * s / r**4 * A,
        tr_chibar_h=-2 * F / r**2 - (2 * r - 4 * r0) / r**3 * A + 2 * lam / r**2 * A,
        chibar_hat_h=vec * (-2 * A),
        eta_h=vec * (s / r**2 * A),
        omegabar_h=-r0 / r**3 * A,
        betabar_h=vec * (3 * r0 / r**3 * A),
        rho_h=3 * r0 / r**4 * F + 3 * r0 * s / r**5 * A,
        tr_chi_prime_s=2 * (r0 - s) / r**3 * F - 2 * s * s / r**4 * A + 2 * lam / r**2 * F,
        eta_s=vec * (s / r**2 * A - F / r),
        beta_s=vec * (3 * r0 / r**3 * F),
    )


def linearized_hypersurface_coeffs(s: float, case, l: int, delta_f: float | None = None,
                                   r0: float = 1.0) -> LinearizedHypersurfaceGeometry:
    """Hypersurface and leaf coefficients at ``Sigma_{s, 0}`` for one mode.

    ``delta_f`` defaults to the case's initial value (the leaf shift frozen
    at ``u = 0``).
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    A, F0 = mode_amplitudes(case, l, r0)
    F = F0 if delta_f is None else float(delta_f)
    return _hypersurface(l, s, F, A, r0)


def gauss_curvature_from_metric(l: int, u: float, F: float, A: float, r0: float = 1.0) -> float:
    """``delta K`` from the conformal metric perturbation ``2(rF + uA) Y_l``.

    For ``g = r^2 (1 + 2 phi) round``: ``delta K = (-lap phi - 2 phi) / r^2``.
    """
    r = r0 + u
    phi = (r * F + u * A) / r**2
    return (eigenvalue(l) * phi - 2 * phi) / r**2


def gauss_curvature_from_gauss_equation(u: float, tr_chibar: float, tr_chi_prime: float,
                                        rho: float, r0: float = 1.0) -> float:
    """``delta K`` from the linearised Gauss equation ``K = -rho + (1/4) tr chi tr chibar``.

    The shear product is quadratic and drops out at linear order.
    """
    r = r0 + u
    bg_chibar = 2 / r
    bg_chi_prime = 2 * u / r**2
    return -rho + (tr_chi_prime * bg_chibar + bg_chi_prime * tr_chibar) / 4


def surface_coefficients(l: int, u: float, F: float, A: float, lapse: float,
                         omegabar: float, r0: float = 1.0) -> SurfaceCoefficients:
    """Leaf geometry in the foliation frame, rescaled by the lapse perturbation.

    The foliation's incoming null normal is ``a`` times the hypersurface one,
    so traces pick up ``delta_a`` times the background expansions and the
    torsion picks up ``d delta_a``. ``omegabar`` needs the lapse derivative,
    which is not available here, and is passed in.
    """
    lam = eigenvalue(l)
    r = r0 + u
    h = _hypersurface(l, u, F, A, r0)
    vec = 0 if l == 0 else 1
    bg_chibar = 2 / r
    bg_chi_prime = 2 * u / r**2
    tr_chibar = h.tr_chibar_h + bg_chibar * lapse
    tr_chi_prime = h.tr_chi_prime_s - bg_chi_prime * lapse
    eta = vec * (h.eta_s + lapse)
    metric = h.metric
    K = gauss_curvature_from_metric(l, u, F, A, r0)
    # mass aspect function K - (1/4) tr chi tr chibar - div eta
    mu = K - (tr_chi_prime * bg_chibar + bg_chi_prime * tr_chibar) / 4 + lam / r**2 * eta
    if l == 0:
        area_radius = h.area_radius
        chi_prime_hat = 0 * r0
    else:
        area_radius = 0 * r0
        chi_prime_hat = -2 * F
    return SurfaceCoefficients(
        lapse=lapse,
        metric=metric,
        area_radius=area_radius,
        tr_chibar=tr_chibar,
        chibar_hat=h.chibar_hat_h,
        chibar_trace_part=(tr_chibar * r**2 + bg_chibar * metric) / 2,
        tr_chi_prime=tr_chi_prime,
        chi_prime_hat=chi_prime_hat,
        chi_prime_trace_part=(tr_chi_prime * r**2 + bg_chi_prime * metric) / 2,
        eta=eta,
        omegabar=omegabar,
        gauss_curvature=K,
        mu=mu,
        betabar=h.betabar_h,
        rho=h.rho_h,
        beta=h.beta_s,
    )


def initial_lapse(case, l: int, r0: float = 1.0) -> float:
    """Lapse coefficient at the initial leaf, from its mode-``l`` elliptic equation.

    ``l = 0``: the mean condition gives ``-A / r0``. ``l >= 1``:
    ``(3 + lambda) / (lambda r0) * F0``.
    """
    A, F0 = mode_amplitudes(case, l, r0)
    if l == 0:
        return -A / r0
    lam = eigenvalue(l)
    return (3 + lam) / (lam * r0) * F0


def initial_omegabar_elliptic(l: int, tr_chibar: float, betabar: float, u: float = 0.0,
                              r0: float = 1.0) -> float:
    """Mode solve of ``lap w = -(3/4) r^2 mu (tr chibar - mean) - div betabar``.

    With ``lap -> -lambda`` and ``div(c dY) = -lambda c Y``; the ``l = 0`` mode
    is fixed by the zero-mean condition.
    """
    if l == 0:
        return 0 * r0
    lam = eigenvalue(l)
    r = r0 + u
    return (3 * r0 / (4 * r) * tr_chibar - lam * betabar) / lam


@dataclass(frozen=True)
class InitialLeafState:
    """All linearised coefficients at the initial leaf for one mode."""

    l: int
    lapse: float
    metric: float
    area_radius: float
    tr_chibar: float
    chibar_hat: float
    chibar_trace_part: float
    tr_chi_prime: float
    chi_prime_hat: float
    chi_prime_trace_part: float
    eta: float
    omegabar: float
    gauss_curvature: float
    gauss_curvature_gauss_eq: float
    mu: float
    betabar: float
    rho: float
    beta: float

    alpha = property(lambda self: 0.0)
    alphabar = property(lambda self: 0.0)
    sigma = property(lambda self: 0.0)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def initial_leaf_state(case, l: int, r0: float = 1.0) -> InitialLeafState:
    """Linearised geometry of the initial leaf ``Sigma_{0,0}`` for one mode.

    Pure rational arithmetic: passing ``r0`` as a ``Fraction`` returns exact
    coefficients.

    ``omegabar`` comes from the elliptic equation; the lapse-derivative route
    needs the flow and lives in :mod:`cmaf.cmaf_flow`.
    """
    A, F0 = mode_amplitudes(case, l, r0)
    a0 = initial_lapse(case, l, r0)
    partial = surface_coefficients(l, 0, F0, A, a0, 0 * r0, r0)
    w = initial_omegabar_elliptic(l, partial.tr_chibar, partial.betabar, 0, r0)
    k_gauss = gauss_curvature_from_gauss_equation(0, partial.tr_chibar, partial.tr_chi_prime,
                                                  partial.rho, r0)
    d = partial.as_dict()
    d["omegabar"] = w
    return InitialLeafState(l=l, gauss_curvature_gauss_eq=k_gauss, **d)
