"""Exception types shared across the package."""


class FedbbaError(Exception):
    """Base class for all package errors."""


class InvalidInput(FedbbaError):
    """An argument violates a documented precondition."""


class InvalidConfig(FedbbaError):
    """A configuration value or combination of values is infeasible."""


class DegenerateDistribution(FedbbaError):
    """Data has (near-)zero variance where a spread is required."""


class DegenerateWeights(FedbbaError):
    """All aggregation weight numerators floored to zero."""


class CriterionViolated(FedbbaError):
    """The defense sensitivity bound cannot deter full poisoning."""
