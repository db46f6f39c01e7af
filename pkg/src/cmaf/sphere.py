"""Real spherical harmonics on the unit round sphere.

Coefficients live in a flat array indexed by ``l*l + l + m`` for
``0 <= l <= l_max`` and ``-l <= m <= l``. The basis is L2-orthonormal:

    Y_{l,0}  = N_l P_l(cos theta)
    Y_{l,m}  = sqrt(2) N_{l,m} P_l^m(cos theta) cos(m phi),    m > 0
    Y_{l,-m} = sqrt(2) N_{l,m} P_l^m(cos theta) sin(m phi),    m > 0

Grids are Gauss-Legendre in ``cos theta`` times uniform in ``phi``; a grid with
``n_theta >= L + 1`` and ``n_phi >= 2L + 1`` integrates every product of two
degree-``L`` harmonics exactly.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ResolutionError

__all__ = [
    "Mode",
    "SphereGrid",
    "SpectralField",
    "GridField",
    "eigenvalue",
    "coeff_index",
    "n_coeffs",
    "normalized_legendre",
    "real_harmonic",
    "analyze",
    "synthesize",
    "laplacian",
    "integrate",
    "inner",
    "tracefree_hessian_div_factor",
    "first_harmonics_basis",
    "fd_gradient",
    "fd_laplacian",
    "fd_tracefree_hessian_div",
    "write_grid_csv",
    "read_grid_csv",
]

DEFAULT_L_MAX = 16


def eigenvalue(l: int) -> int:
    """``lambda_l = l (l + 1)``, the eigenvalue of minus the round Laplacian."""
    if l < 0:
        raise ValueError(f"degree must be nonnegative, got {l}")
    return l * (l + 1)


@dataclass(frozen=True)
class Mode:
    l: int

    def __post_init__(self) -> None:
        if not isinstance(self.l, (int, np.integer)) or self.l < 0:
            raise ValueError(f"degree must be a nonnegative integer, got {self.l!r}")

    @property
    def lam(self) -> int:
        return eigenvalue(int(self.l))


def coeff_index(l: int, m: int) -> int:
    if abs(m) > l:
        raise ValueError(f"|m| = {abs(m)} exceeds l = {l}")
    return l * l + l + m


def n_coeffs(l_max: int) -> int:
    return (l_max + 1) ** 2


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Gauss-Legendre x uniform-azimuth quadrature grid."""

    n_theta: int
    n_phi: int

    def __post_init__(self) -> None:
        if self.n_theta < 1 or self.n_phi < 1:
            raise ValueError("grid sizes must be positive")
        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        # north to south
        x, w = x[::-1], w[::-1]
        phi = 2 * np.pi * np.arange(self.n_phi) / self.n_phi
        object.__setattr__(self, "cos_theta", _frozen(x))
        object.__setattr__(self, "theta", _frozen(np.arccos(x)))
        object.__setattr__(self, "phi", _frozen(phi))
        object.__setattr__(self, "theta_weights", _frozen(w))
        weights = np.outer(w, np.full(self.n_phi, 2 * np.pi / self.n_phi))
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def for_degree(cls, l_max: int) -> SphereGrid:
        """Smallest grid that resolves band limit ``l_max``."""
        return cls(l_max + 1, 2 * l_max + 1)

    @property
    def max_degree(self) -> int:
        return min(self.n_theta - 1, (self.n_phi - 1) // 2)

    def resolves(self, l_max: int) -> bool:
        return l_max <= self.max_degree

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def nodes(self) -> np.ndarray:
        """Rows of ``(theta, phi, weight)``."""
        th, ph = self.mesh()
        return np.column_stack([th.ravel(), ph.ravel(), self.weights.ravel()])

    def same_as(self, other: SphereGrid) -> bool:
        return self.n_theta == other.n_theta and self.n_phi == other.n_phi


@dataclass(frozen=True, eq=False)
class SpectralField:
    l_max: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = _frozen(self.coeffs)
        if c.shape != (n_coeffs(self.l_max),):
            raise ValueError(f"expected {n_coeffs(self.l_max)} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, l_max: int) -> SpectralField:
        return cls(l_max, np.zeros(n_coeffs(l_max)))

    @classmethod
    def single(cls, l: int, m: int, value: float = 1.0, l_max: int | None = None) -> SpectralField:
        l_max = l if l_max is None else l_max
        c = np.zeros(n_coeffs(l_max))
        c[coeff_index(l, m)] = value
        return cls(l_max, c)

    def __getitem__(self, lm: tuple[int, int]) -> float:
        l, m = lm
        return float(self.coeffs[coeff_index(l, m)])

    def degree_slice(self, l: int) -> np.ndarray:
        return self.coeffs[l * l:(l + 1) ** 2]


@dataclass(frozen=True, eq=False)
class GridField:
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = _frozen(self.values)
        if v.shape != (self.grid.n_theta, self.grid.n_phi):
            raise ValueError(f"values shape {v.shape} does not match grid")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: SphereGrid, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> GridField:
        th, ph = grid.mesh()
        return cls(grid, np.broadcast_to(fn(th, ph), th.shape))


def normalized_legendre(l_max: int, x: np.ndarray) -> np.ndarray:
    """Orthonormalised associated Legendre values, shape ``(l_max+1, l_max+1) + x.shape``.

    Entry ``[l, m]`` holds ``N_{l,m} P_l^m(x)`` for ``m <= l`` (zero otherwise),
    normalised so that ``N P e^{i m phi}`` has unit L2 norm on the sphere.
    Sectoral seeding followed by the standard three-term recurrence in ``l``.
    The Condon-Shortley phase is omitted.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((l_max + 1, l_max + 1) + x.shape)
    sin_t = np.sqrt(np.clip(1 - x * x, 0.0, None))
    pmm = np.full(x.shape, 1 / math.sqrt(4 * math.pi))
    for m in range(l_max + 1):
        if m > 0:
            pmm = pmm * math.sqrt((2 * m + 1) / (2 * m)) * sin_t
        out[m, m] = pmm
        if m + 1 <= l_max:
            out[m + 1, m] = math.sqrt(2 * m + 3) * x * pmm
        for l in range(m + 2, l_max + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt((2 * l + 1) * ((l - 1) ** 2 - m * m) / ((2 * l - 3) * (l * l - m * m)))
            out[l, m] = a * x * out[l - 1, m] - b * out[l - 2, m]
    return out


def _basis(l_max: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """All real harmonics up to ``l_max`` on the tensor grid, ``(ncoeff, nth, nph)``."""
    p = normalized_legendre(l_max, np.cos(theta))
    out = np.empty((n_coeffs(l_max), theta.size, phi.size))
    root2 = math.sqrt(2.0)
    for m in range(l_max + 1):
        cos_m = np.cos(m * phi)
        sin_m = np.sin(m * phi)
        for l in range(m, l_max + 1):
            if m == 0:
                out[coeff_index(l, 0)] = np.outer(p[l, 0], np.ones_like(phi))
            else:
                out[coeff_index(l, m)] = root2 * np.outer(p[l, m], cos_m)
                out[coeff_index(l, -m)] = root2 * np.outer(p[l, m], sin_m)
    return out


def real_harmonic(l: int, m: int, theta, phi) -> np.ndarray:
    """Pointwise value of the orthonormal real harmonic ``Y_{l,m}``."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    p = normalized_legendre(l, np.cos(theta))[l, abs(m)]
    if m == 0:
        return p
    trig = np.cos(m * phi) if m > 0 else np.sin(-m * phi)
    return math.sqrt(2.0) * p * trig


def analyze(field: GridField, l_max: int = DEFAULT_L_MAX) -> SpectralField:
    """L2 projection of a grid field onto the harmonics of degree ``<= l_max``."""
    grid = field.grid
    if not grid.resolves(l_max):
        raise ResolutionError(
            f"grid {grid.n_theta}x{grid.n_phi} resolves degree {grid.max_degree} < {l_max}"
        )
    basis = _basis(l_max, grid.theta, grid.phi)
    coeffs = np.tensordot(basis, field.values * grid.weights, axes=([1, 2], [0, 1]))
    return SpectralField(l_max, coeffs)


def synthesize(coeffs: SpectralField, grid: SphereGrid) -> GridField:
    """Pointwise sum of basis functions on ``grid``."""
    basis = _basis(coeffs.l_max, grid.theta, grid.phi)
    return GridField(grid, np.tensordot(coeffs.coeffs, basis, axes=(0, 0)))


def _lambdas(l_max: int) -> np.ndarray:
    ls = np.concatenate([np.full(2 * l + 1, l) for l in range(l_max + 1)])
    return (ls * (ls + 1)).astype(float)


def laplacian(coeffs: SpectralField) -> SpectralField:
    """Round Laplacian, diagonal with eigenvalue ``-l(l+1)``."""
    return SpectralField(coeffs.l_max, -_lambdas(coeffs.l_max) * coeffs.coeffs)


def integrate(field: GridField) -> float:
    """Quadrature of ``field`` against the round area element."""
    return float(np.sum(field.values * field.grid.weights))


def inner(f: GridField, g: GridField) -> float:
    if not f.grid.same_as(g.grid):
        raise ValueError("fields live on different grids")
    return float(np.sum(f.values * g.values * f.grid.weights))


def tracefree_hessian_div_factor(l: int) -> float:
    """Scalar ``c_l`` with ``div(hess Y_l - (1/2) g lap Y_l) = c_l dY_l``.

    Follows from the Ricci identity on the unit sphere: ``c_l = 1 - lambda_l / 2``.
    """
    return 1.0 - eigenvalue(l) / 2.0


def first_harmonics_basis(grid: SphereGrid) -> tuple[GridField, GridField, GridField]:
    """The coordinate functions ``x, y, z`` restricted to the sphere.

    Each has squared L2 norm ``4 pi / 3`` and zero mean.
    """
    if not grid.resolves(1):
        raise ResolutionError("grid does not resolve degree 1")
    th, ph = grid.mesh()
    st = np.sin(th)
    return (
        GridField(grid, st * np.cos(ph)),
        GridField(grid, st * np.sin(ph)),
        GridField(grid, np.cos(th)),
    )


# finite-difference oracles in (theta, phi) coordinates

def _d1(fn, theta, phi, h, axis):
    """Fourth-order central first derivative of ``fn`` along one coordinate."""
    def at(k):
        return fn(theta + k * h, phi) if axis == 0 else fn(theta, phi + k * h)
    return (at(-2) - 8 * at(-1) + 8 * at(1) - at(2)) / (12 * h)


def _d2(fn, theta, phi, h, axis):
    def at(k):
        return fn(theta + k * h, phi) if axis == 0 else fn(theta, phi + k * h)
    return (-at(2) + 16 * at(1) - 30 * at(0) + 16 * at(-1) - at(-2)) / (12 * h * h)


def fd_gradient(fn, theta, phi, h: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate components ``(d_theta f, d_phi f)``."""
    return _d1(fn, theta, phi, h, 0), _d1(fn, theta, phi, h, 1)


def _hessian(fn, h):
    """Covariant Hessian components of ``fn`` as callables of ``(theta, phi)``."""
    def h_tt(th, ph):
        return _d2(fn, th, ph, h, 0)

    def h_tp(th, ph):
        d_phi = lambda t, p: _d1(fn, t, p, h, 1)  # noqa: E731
        return _d1(d_phi, th, ph, h, 0) - np.cos(th) / np.sin(th) * _d1(fn, th, ph, h, 1)

    def h_pp(th, ph):
        return _d2(fn, th, ph, h, 1) + np.sin(th) * np.cos(th) * _d1(fn, th, ph, h, 0)

    return h_tt, h_tp, h_pp


def fd_laplacian(fn, theta, phi, h: float = 1e-3) -> np.ndarray:
    """Round Laplacian by finite differences of the covariant Hessian."""
    h_tt, _, h_pp = _hessian(fn, h)
    return h_tt(theta, phi) + h_pp(theta, phi) / np.sin(theta) ** 2


def fd_tracefree_hessian_div(fn, theta, phi, h: float = 2.5e-3) -> tuple[np.ndarray, np.ndarray]:
    """Divergence of the trace-free Hessian of ``fn`` by nested finite differences.

    Returns the ``(theta, phi)`` covector components. Points must stay away
    from the poles by several multiples of ``h``.
    """
    h_tt, h_tp, h_pp = _hessian(fn, h)

    def lap(th, ph):
        return h_tt(th, ph) + h_pp(th, ph) / np.sin(th) ** 2

    def t_tt(th, ph):
        return h_tt(th, ph) - 0.5 * lap(th, ph)

    def t_pp(th, ph):
        return h_pp(th, ph) - 0.5 * np.sin(th) ** 2 * lap(th, ph)

    s = np.sin(theta)
    c = np.cos(theta)
    cot = c / s
    tt = t_tt(theta, phi)
    tp = h_tp(theta, phi)
    pp = t_pp(theta, phi)
    div_t = _d1(t_tt, theta, phi, h, 0) + (_d1(h_tp, theta, phi, h, 1) + s * c * tt - cot * pp) / s**2
    div_p = _d1(h_tp, theta, phi, h, 0) - cot * tp + (_d1(t_pp, theta, phi, h, 1) + 2 * s * c * tp) / s**2
    return div_t, div_p


# CSV exchange for grid fields: rows of (theta, phi, value)

def write_grid_csv(field: GridField, path: str | Path) -> None:
    th, ph = field.grid.mesh()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "phi", "value"])
        for t, p, v in zip(th.ravel(), ph.ravel(), field.values.ravel()):
            w.writerow([f"{t:.17g}", f"{p:.17g}", f"{v:.17g}"])


def read_grid_csv(path: str | Path) -> GridField:
    """Read a field written by :func:`write_grid_csv`.

    The grid is rebuilt from the node counts and the stored nodes are checked
    against it.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["theta", "phi", "value"]:
            raise ValueError(f"unexpected header {header!r}")
        for row in reader:
            if row:
                rows.append([float(x) for x in row])
    data = np.array(rows, dtype=float)
    n_theta = len(np.unique(np.round(data[:, 0], 12)))
    n_phi = len(np.unique(np.round(data[:, 1], 12)))
    if n_theta * n_phi != len(data):
        raise ValueError("rows do not form a tensor grid")
    grid = SphereGrid(n_theta, n_phi)
    th, ph = grid.mesh()
    if not (np.allclose(data[:, 0], th.ravel(), atol=1e-12) and np.allclose(data[:, 1], ph.ravel(), atol=1e-12)):
        raise ValueError("nodes are not a Gauss-Legendre x uniform grid in row-major order")
    return GridField(grid, data[:, 2].reshape(n_theta, n_phi))
