"""Exception types raised by doseline."""


class DoselineError(Exception):
    """Base class for all doseline errors."""


class EmptyQuadratureError(DoselineError, ValueError):
    """No grid cell center lies inside the domain."""


class DegenerateSegmentError(DoselineError, ValueError):
    """A segment was built from two coincident endpoints."""


class SingularEvaluationError(DoselineError, ValueError):
    """A kernel was evaluated at (or numerically at) one of its source nodes."""


class PreconditionError(DoselineError, ValueError):
    """An input violates a documented precondition."""


class InvalidDataError(DoselineError, ValueError):
    """Non-finite or inconsistently shaped numerical data."""


class NumericalFailure(DoselineError, RuntimeError):
    """A factorization broke down.

    Attributes
    ----------
    diagnostics : dict
        Whatever conditioning information was available at failure time.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(DoselineError, ValueError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        full = f"{message} ({', '.join(where)})" if where else message
        super().__init__(full)
        self.key = key
        self.line = line
