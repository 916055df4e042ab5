"""Exception types shared across the solver."""


class SolverError(Exception):
    pass


class SmtParseError(SolverError):
    def __init__(self, msg, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            msg = f"{line}:{col}: {msg}"
        super().__init__(msg)


class UnsupportedFeature(SolverError):
    pass


class SortError(SolverError):
    pass


class EvaluationError(SolverError):
    """Raised for undefined operations such as division by zero."""


class ResourceOut(SolverError):
    """A deadline or budget was exhausted."""
