"""Exception types shared across the solver modules."""


class EdgebandError(Exception):
    """Base class for all solver errors."""


class NotDiracPointError(EdgebandError):
    """Degeneracy or non-degeneracy conditions failed at the requested tolerance."""


class NoZeroModeError(EdgebandError):
    """The effective Dirac operator has no zero-energy bound state for this wall."""


class NoGapError(EdgebandError):
    """The asymptotic periodic operators have no spectral gap at this coupling."""


class ConvergenceError(EdgebandError):
    """An iterative or grid-refined computation failed to converge."""


class GridError(EdgebandError):
    """A sampling grid is too coarse or does not cover the requested range."""
