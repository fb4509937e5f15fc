"""Exception hierarchy shared by the evaluators."""


class ParamSeriesError(Exception):
    pass


class DomainError(ParamSeriesError, ValueError):
    """An argument lies outside the region where a representation is defined."""


class InvalidMu(ParamSeriesError, ValueError):
    """The outer series cannot converge for this parameter value."""


class NotConverged(ParamSeriesError, ArithmeticError):
    """Raised when the term budget runs out before the tail is small enough.

    The partial result is attached as ``report`` so callers (sweeps in
    particular) can still inspect it.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoConvergentMu(ParamSeriesError):
    pass
