"""Exception hierarchy.

Every error raised on purpose derives from :class:`GeksError`. The two
intermediate classes decide the CLI exit code: :class:`DataError` maps to
exit code 2 and :class:`NumericalError` to exit code 3.
"""


class GeksError(Exception):
    """Base class for all errors raised by this package."""


class DataError(GeksError, ValueError):
    """Input data is malformed or inconsistent."""


class NumericalError(GeksError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy answer."""


class DimensionMismatch(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, path=None, row=None, col=None):
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if col is not None:
            where.append(f"col {col}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.path = path
        self.row = row
        self.col = col


class ConstantOutcome(DataError):
    pass


class InvalidConfig(DataError):
    pass


class AsymmetricKernel(DataError):
    pass


class IndefiniteKernel(DataError):
    pass


class InvalidParameter(NumericalError, ValueError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class DegenerateCovariance(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class RankDeficientCovariates(DataError):
    pass


class PerfectSeparation(NumericalError):
    pass


class DegenerateTest(NumericalError):
    pass


class NonpositiveMatchedMean(NumericalError):
    pass
