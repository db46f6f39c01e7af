"""Schwarzschild double-null coordinates and background geometry.

The chart ``(s, sbar)`` is fixed by the implicit relation

    (r - r0) * exp(r / r0) = s * exp((sbar + s + r0) / r0),

with conformal factor ``omega_sq = ((s + r0) / r) * exp((sbar + s + r0 - r) / r0)``.
On ``sbar = 0`` the relation reduces to ``r = r0 + s`` and ``omega_sq = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NonConvergence

__all__ = [
    "SchwarzschildParams",
    "BackgroundPoint",
    "BackgroundFields",
    "solve_radius",
    "conformal_factor",
    "background_point",
    "background_fields",
    "VANISHING_COMPONENTS",
]

NEWTON_MAX_ITER = 64
BISECT_MAX_ITER = 400
_EPS = 2.220446049250313e-16

# background components that vanish identically by spherical symmetry
VANISHING_COMPONENTS = (
    "chi_hat_prime",
    "chibar_hat",
    "eta",
    "etabar",
    "alpha",
    "alphabar",
    "beta",
    "betabar",
    "sigma",
)


@dataclass(frozen=True)
class SchwarzschildParams:
    """Horizon area radius ``r0``; the mass is ``m = r0 / 2``."""

    r0: float = 1.0

    def __post_init__(self) -> None:
        if not (self.r0 > 0 and math.isfinite(self.r0)):
            raise DomainError(f"r0 must be positive and finite, got {self.r0!r}")

    @property
    def m(self) -> float:
        return 0.5 * self.r0


@dataclass(frozen=True)
class BackgroundPoint:
    s: float
    sbar: float
    r: float
    omega_sq: float


def _zero(self) -> float:
    return 0.0


@dataclass(frozen=True)
class BackgroundFields:
    """Background connection and curvature scalars at one point.

    Components that vanish by symmetry (shears, torsions, and all curvature
    components except ``rho``) are exposed as properties returning ``0.0``.
    """

    s: float
    sbar: float
    r: float
    omega_sq: float
    dr_dsbar: float
    dr_ds: float
    tr_chi_prime: float
    tr_chibar: float
    omega: float
    omegabar: float
    rho: float
    mu: float
    hawking_mass: float

    chi_hat_prime = property(_zero)
    chibar_hat = property(_zero)
    eta = property(_zero)
    etabar = property(_zero)
    alpha = property(_zero)
    alphabar = property(_zero)
    beta = property(_zero)
    betabar = property(_zero)
    sigma = property(_zero)

    def as_dict(self) -> dict[str, float]:
        keys = (
            "s", "sbar", "r", "omega_sq", "dr_dsbar", "dr_ds", "tr_chi_prime",
            "tr_chibar", "omega", "omegabar", "rho", "mu", "hawking_mass",
        )
        return {k: getattr(self, k) for k in keys}


def _check_r0(r0: float) -> None:
    if not (r0 > 0 and math.isfinite(r0)):
        raise DomainError(f"r0 must be positive and finite, got {r0!r}")


def _scaled_residual(r: float, s: float, c: float, r0: float) -> tuple[float, float, float]:
    """Return h(r), h'(r) and the magnitude scale of h.

    ``h`` is the implicit relation divided by ``exp(c / r0)``, which keeps the
    exponentials near unity close to the root.
    """
    e = math.exp((r - c) / r0)
    lhs = (r - r0) * e
    return lhs - s, (r / r0) * e, max(abs(lhs), abs(s))


def _converged(h: float, dh: float, scale: float, r: float, tol: float) -> bool:
    # the rounding of r itself bounds how small h can get, which matters when
    # r - r0 is tiny compared with r
    return abs(h) <= tol * scale + 4 * _EPS * r * abs(dh)


def solve_radius(s: float, sbar: float, tol: float = 1e-14, r0: float = 1.0) -> float:
    """Area radius ``r`` at the double-null point ``(s, sbar)``.

    Newton iteration on the monotone relation, with a bisection fallback if
    Newton does not settle within its iteration cap.

    Raises
    ------
    DomainError
        If ``s <= -r0`` or no positive root exists.
    NonConvergence
        If neither Newton nor bisection reaches ``tol``.
    """
    _check_r0(r0)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not (math.isfinite(s) and math.isfinite(sbar)):
        raise DomainError("coordinates must be finite")
    if s <= -r0:
        raise DomainError(f"s = {s!r} must exceed -r0 = {-r0!r}")
    if s == 0.0:
        return r0
    c = sbar + s + r0
    # F(0) = -r0, so a positive root needs s * exp(c / r0) > -r0
    if s < 0 and s * math.exp(c / r0) <= -r0:
        raise DomainError(f"no positive radius for (s, sbar) = ({s!r}, {sbar!r})")
    if sbar == 0.0:
        return r0 + s

    tol_eff = max(tol, 4 * _EPS)
    r = r0 + max(s, 0.0) + max(sbar, 0.0)
    for _ in range(NEWTON_MAX_ITER):
        h, dh, scale = _scaled_residual(r, s, c, r0)
        if _converged(h, dh, scale, r, tol_eff):
            return r
        step = h / dh
        r_new = r - step
        if r_new <= 0:
            r_new = 0.5 * r
        if abs(r_new - r) <= _EPS * r:
            r = r_new
            h, dh, scale = _scaled_residual(r, s, c, r0)
            if _converged(h, dh, scale, r, tol_eff):
                return r
            break
        r = r_new
    return _bisect_radius(s, sbar, c, tol_eff, r0)


def _bisect_radius(s: float, sbar: float, c: float, tol: float, r0: float) -> float:
    lo = r0 * (1 - 1e-9) if s > 0 else 0.0
    hi = r0 + abs(s) + abs(sbar) + 10 * r0
    while _scaled_residual(hi, s, c, r0)[0] <= 0:
        hi *= 2
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        h, dh, scale = _scaled_residual(mid, s, c, r0)
        if _converged(h, dh, scale, mid, tol):
            return mid
        if h < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _EPS * hi:
            break
    mid = 0.5 * (lo + hi)
    h, dh, scale = _scaled_residual(mid, s, c, r0)
    if _converged(h, dh, scale, mid, tol):
        return mid
    raise NonConvergence(f"radius solve failed at (s, sbar) = ({s!r}, {sbar!r})")


def _exp_factor(s: float, sbar: float, r: float, r0: float) -> float:
    return math.exp((sbar + s + r0 - r) / r0)


def conformal_factor(s: float, sbar: float, r0: float = 1.0) -> float:
    """``Omega^2`` at ``(s, sbar)``."""
    r = solve_radius(s, sbar, r0=r0)
    return (s + r0) / r * _exp_factor(s, sbar, r, r0)


def background_point(s: float, sbar: float, r0: float = 1.0) -> BackgroundPoint:
    r = solve_radius(s, sbar, r0=r0)
    return BackgroundPoint(s, sbar, r, (s + r0) / r * _exp_factor(s, sbar, r, r0))


def background_fields(s: float, sbar: float, r0: float = 1.0) -> BackgroundFields:
    """All non-vanishing background scalars at ``(s, sbar)``."""
    r = solve_radius(s, sbar, r0=r0)
    e = _exp_factor(s, sbar, r, r0)
    omega_sq = (s + r0) / r * e
    tr_chi_prime = 2 * s / (r * (s + r0))
    tr_chibar = 2 * (s + r0) / r**2 * e
    omegabar = 1 / (2 * (s + r0)) + 1 / (2 * r0) - (1 / (2 * r) + 1 / (2 * r0)) * omega_sq
    mu = r0 / r**3
    hawking_mass = 0.5 * r * (1 - 0.25 * r**2 * tr_chi_prime * tr_chibar)
    return BackgroundFields(
        s=s,
        sbar=sbar,
        r=r,
        omega_sq=omega_sq,
        dr_dsbar=(r - r0) / r,
        # (s + r0)/r * (r - r0)/s, with (r - r0)/s = e from the implicit relation
        dr_ds=omega_sq,
        tr_chi_prime=tr_chi_prime,
        tr_chibar=tr_chibar,
        omega=r0 / (2 * r**2),
        omegabar=omegabar,
        rho=-mu,
        mu=mu,
        hawking_mass=hawking_mass,
    )
