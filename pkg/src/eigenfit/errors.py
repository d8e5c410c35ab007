"""Exception types shared across the package."""


class EigenfitError(Exception):
    """Base class for all numerical and usage errors raised by eigenfit."""


class StepSizeUnderflowError(EigenfitError):
    """The adaptive integrator could not meet the tolerance with a step
    above the floating-point floor.

    Attributes:
        x: abscissa at which the step size collapsed.
    """

    def __init__(self, x: float, message: str | None = None):
        self.x = x
        super().__init__(message or f"step size underflow at x = {x!r}")


class QuadratureError(EigenfitError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class BracketingError(EigenfitError):
    """No sign change found for an eigenvalue inside the expanded search
    window."""


class ZeroCountError(EigenfitError):
    """The interior zero count of a shot eigenfunction does not certify the
    requested mode index."""


class SingularBasisError(EigenfitError):
    """The Gram matrix of a basis is numerically singular."""


class InversionError(EigenfitError):
    """The reconstruction loop hit an unrecoverable numerical failure
    (rank collapse, or a forward solve aborted mid-iteration)."""


class ConfigError(EigenfitError):
    """A problem configuration file is malformed or inconsistent."""
