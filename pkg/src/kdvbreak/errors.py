"""Exception hierarchy shared by all kdvbreak modules."""


class KdvBreakError(Exception):
    """Base class for every error raised by this package."""


class DomainError(KdvBreakError, ValueError):
    """Argument outside the domain where the quantity is defined."""


class RangeError(KdvBreakError, ValueError):
    """Evaluation point outside the supported window."""


class InconsistencyError(KdvBreakError):
    """Input data violates a structural invariant (e.g. root not bracketed)."""


class SingularityError(KdvBreakError, ArithmeticError):
    """Formula evaluated at a point where it is singular."""


class GenericityError(KdvBreakError):
    """Catastrophe point is not generic (k vanishes)."""


class ShapeError(KdvBreakError):
    """Profile does not have the single-bump shape required."""


class PoleError(KdvBreakError, ArithmeticError):
    """Gamma-function pole hit."""


class BranchError(KdvBreakError, ValueError):
    """Argument lies on a branch cut."""


class ConvergenceError(KdvBreakError):
    """Iterative solver failed to converge."""

    def __init__(self, message, T=None):
        super().__init__(message)
        self.T = T


class SpacingError(KdvBreakError, ValueError):
    """Ladder of parameter values is not equally spaced."""


class InstabilityError(KdvBreakError):
    """Time stepper lost conservation; caller should reduce dt."""


class ConfigError(KdvBreakError, ValueError):
    """Configuration is invalid."""


class ParseError(ConfigError):
    """Configuration text is malformed."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
