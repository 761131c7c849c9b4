"""Exception hierarchy.

Input problems derive from ``ValueError`` so callers that only care about
bad arguments can catch that; numerical breakdowns derive from
``NumericalError`` and map to exit code 3 in the CLI.
"""


class QslError(Exception):
    """Base class for every error raised by this package."""


class NumericalError(QslError, ArithmeticError):
    """A computation failed or left its tolerance band."""


class InvalidState(QslError, ValueError):
    """Matrix is not an acceptable density matrix."""


class NotHermitian(InvalidState):
    pass


class NotPositive(InvalidState):
    pass


class TraceDeviation(InvalidState):
    pass


class DimensionMismatch(QslError, ValueError):
    pass


class UnsupportedDimension(QslError, ValueError):
    pass


class SingularInput(QslError, ValueError):
    pass


class DegenerateState(NumericalError):
    pass


class EigenFailure(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class ValidationFailure(NumericalError):
    """A trajectory node left the positivity/trace tolerance band."""


class GridTooCoarse(QslError, ValueError):
    pass


class EigenTrackingFailure(NumericalError):
    pass


class ZeroSpeed(NumericalError):
    pass
