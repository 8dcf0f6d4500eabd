"""Exception hierarchy shared by all modules."""


class ValidationError(ValueError):
    """Bad user input: inconsistent parameters, malformed config."""


class NumericalError(RuntimeError):
    """A numerical stage failed to deliver the requested accuracy."""

    def __init__(self, message, residual=None, stage=None):
        super().__init__(message)
        self.residual = residual
        self.stage = stage


class ConvergenceError(NumericalError):
    """Iterative solver stopped without meeting its tolerance."""


class BandCountError(NumericalError):
    """The band-count hypothesis is inconsistent with a positive density."""


class QuadratureError(NumericalError):
    """Quadrature did not converge or lost positivity."""
