"""Linearised constant-mass-aspect-function foliations in Schwarzschild.

The package is layered bottom-up:

- ``background``: double-null coordinates and background geometry
- ``sphere``: real spherical harmonics on Gauss-Legendre grids
- ``linear_geometry``: per-mode linearised geometry and the initial leaf
- ``cmaf_flow``: the lapse ODE, closed forms, and basic-equation residuals
- ``asymptotics``: renormalised limits and the spectrum at null infinity
- ``bondi``: linearised energy, momentum and Bondi mass
"""

from .errors import DomainError, NonConvergence, ResolutionError, StepError

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "NonConvergence",
    "ResolutionError",
    "StepError",
    "__version__",
]
