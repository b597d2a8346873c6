"""Exception types raised by qmatfun.

Every domain error derives from :class:`QMatFunError`, which is a
``ValueError`` so callers that only care about bad input can catch that.
The ``kind`` attribute is the stable name used in CLI error reports.
"""


class QMatFunError(ValueError):
    @property
    def kind(self):
        return type(self).__name__


class TruncationNotConverged(QMatFunError):
    pass


class PoleEncountered(QMatFunError):
    pass


class DivisionByZero(QMatFunError, ZeroDivisionError):
    pass


class BranchCutViolation(QMatFunError):
    pass


class SingularMatrix(QMatFunError):
    pass


class SingularFactor(QMatFunError):
    """A factor of a matrix q-shifted factorial is not invertible."""

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"factor {k} is singular")


class EigenFailure(QMatFunError):
    pass


class NotPositiveStable(QMatFunError):
    pass


class NotCommuting(QMatFunError):
    pass


class SingularGamma(QMatFunError):
    pass
