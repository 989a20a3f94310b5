"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Operations or vectors with incompatible dimension, degree or arity."""


class DomainError(ValueError):
    """An input lies outside the domain where a formula is defined."""


class BranchCutError(DomainError):
    """A phase-space point is too close to the cut of the auxiliary functions."""


class IntegrationError(RuntimeError):
    """The time stepper produced a non-finite state."""
