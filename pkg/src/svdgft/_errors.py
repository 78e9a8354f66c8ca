class GraphValidationError(ValueError):
    """Raised when a graph, signal or parameter violates its contract."""


class GraphFormatError(GraphValidationError):
    """Raised when a graph or signal file cannot be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConsistencyError(RuntimeError):
    """Raised when a constructed factorization fails its own residual check."""

    def __init__(self, message, residual=None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


class HypothesisViolation(ValueError):
    """Raised when an analytic formula is evaluated outside its hypotheses."""
