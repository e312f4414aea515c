"""Exception types shared across the package."""


class ChuteError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ChuteError):
    """Malformed instance file or result file."""


class DimensionError(ChuteError):
    """Vector/matrix shapes do not match the declared sizes."""


class DomainError(ChuteError):
    """Value outside the admissible domain (signs, integrality, zero divisors)."""


class ParameterError(ChuteError):
    """Invalid algorithm parameter (deadlines, gamma, rho, ranges, guards)."""


class StateError(ChuteError):
    """Operation called on an object in an unusable state (e.g. empty shell)."""


class ConsistencyError(ChuteError):
    """Internal consistency violated (e.g. crossed bounds); signals an upstream bug."""


class ScopeError(ChuteError):
    """Input outside the supported scope (e.g. objective count not in {2, 3})."""


class SolverError(ChuteError):
    """Failure inside a solve, wrapped with the stage that caused it."""
