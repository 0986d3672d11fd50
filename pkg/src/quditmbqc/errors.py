"""Exception types raised across the package."""


class QuditError(ValueError):
    """Base class for all package errors."""


class InvalidDimensionError(QuditError):
    pass


class NotAUnitError(QuditError):
    pass


class UnsupportedDimensionError(QuditError):
    """Raised for constructions that only exist in prime (or odd prime) dimension."""


class NotUnitaryError(QuditError):
    pass


class ShapeMismatchError(QuditError):
    pass


class GraphError(QuditError):
    """Invalid cluster graph: self-loops, out-of-range vertices, duplicate edges."""


class PatternError(QuditError):
    """A measurement pattern does not fit the cluster it is run on."""


class UnsupportedTopologyError(PatternError):
    """The cluster cannot be split into logical wires joined by interaction edges."""


class NotCliffordError(QuditError):
    pass


class ParseError(QuditError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DecompositionFailed(QuditError):
    pass
