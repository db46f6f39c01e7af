"""Exception types shared across modules."""


class CmafError(Exception):
    """Base class for all package errors."""


class DomainError(CmafError, ValueError):
    """Input lies outside the domain of the coordinate chart."""


class NonConvergence(CmafError, RuntimeError):
    """An iterative solver failed to reach its tolerance."""


class ResolutionError(CmafError, ValueError):
    """A quadrature grid cannot resolve the requested degree."""


class StepError(CmafError, ValueError):
    """An integrator step is too coarse for the accuracy guard."""
