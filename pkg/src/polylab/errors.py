"""Exception types raised across polylab."""


class PolylabError(Exception):
    """Base class for all polylab errors."""


class DimensionMismatch(PolylabError, ValueError):
    pass


class DegenerateInput(PolylabError, ValueError):
    """Points do not affinely span the ambient space."""


class InvalidPolytope(PolylabError, ValueError):
    pass


class NonConvergence(PolylabError, RuntimeError):
    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class OutsideBody(PolylabError, ValueError):
    pass


class OutsideSupport(PolylabError, ValueError):
    pass


class NoBoundingBox(PolylabError, TypeError):
    pass


class Unsupported(PolylabError, NotImplementedError):
    pass


class SingularTransform(PolylabError, ValueError):
    pass


class EmptyInput(PolylabError, ValueError):
    pass


class InvalidQ(PolylabError, ValueError):
    pass


class NonPositiveMoment(PolylabError, ValueError):
    """A moment estimate is not positive, so its logarithm is undefined."""


class InsufficientTailMass(PolylabError, ValueError):
    pass


class ParseError(PolylabError, ValueError):
    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class ValidationError(PolylabError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class LowAcceptanceWarning(UserWarning):
    """Rejection sampler accepted fewer than 1 in 1000 proposals."""
