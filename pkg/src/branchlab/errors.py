"""Exception types shared across the package."""


class BranchLabError(Exception):
    """Base class for all branchlab errors."""


class ParameterError(BranchLabError, ValueError):
    """Invalid argument: bad sampling vector, bounds, or configuration."""


class DomainError(BranchLabError, ValueError):
    """Numeric input outside the mathematical domain of an operation."""


class NumericError(BranchLabError, RuntimeError):
    """A numeric routine failed to converge to the requested accuracy."""


class BracketError(BranchLabError, ValueError):
    """A root-finding bracket does not contain a sign change."""
