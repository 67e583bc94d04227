"""Exception hierarchy shared by the solvers, factorizations and readers."""


class KrylovError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(KrylovError, ValueError):
    """Operand shapes do not agree."""


class SingularMatrixError(KrylovError, ArithmeticError):
    """A pivot vanished to working precision."""


class NotSymmetricError(KrylovError, ValueError):
    """Raised when a symmetric matrix was required.

    ``pair`` holds the first offending ``(i, j)`` position (0-based).
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class IndefiniteMatrixError(KrylovError, ArithmeticError):
    """Non-positive curvature or eigenvalue met where SPD was required."""


class PreconditionerError(KrylovError, ArithmeticError):
    """Incomplete factorization or its triangular solves failed.

    ``row`` is the 0-based row where the failure was detected, if known.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class RankDeficientError(KrylovError, ArithmeticError):
    """Zero column met while reducing a Hessenberg least-squares problem."""


class MatrixMarketError(KrylovError, ValueError):
    """Base class for Matrix Market parse errors; carries the 1-based line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BannerError(MatrixMarketError):
    pass


class UnsupportedFormatError(MatrixMarketError):
    pass


class FieldError(MatrixMarketError):
    pass


class IndexRangeError(MatrixMarketError):
    pass


class TruncatedError(MatrixMarketError):
    pass
