"""Exception hierarchy.

Every error raised on bad input derives from :class:`QminError`, which is a
``ValueError`` so callers that only care about "bad input" can catch that.
"""


class QminError(ValueError):
    """Base class for all input/validation errors raised by qmin."""


class InvalidDimensionError(QminError):
    pass


class ShapeError(QminError):
    pass


class HermiticityError(QminError):
    pass


class TraceError(QminError):
    pass


class PositivityError(QminError):
    """Raised when a matrix has an eigenvalue below the positivity floor."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class SpectralInputError(QminError):
    pass


class PreconditionError(QminError):
    pass


class InvalidUnitaryError(QminError):
    pass


class InfeasibleMeasurementError(QminError):
    """The measurement disturbs the reduced state it is supposed to preserve."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
