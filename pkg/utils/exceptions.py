"""
Exceptions Module for Trotter Error Statistics Toolkit

The CLI maps these onto exit codes: configuration problems exit with 2 and
numeric-limit problems with 3.
"""


class TrotterStatsError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TrotterStatsError):
    """Raised when an experiment configuration is invalid or has unknown fields."""


class DimensionLimitError(TrotterStatsError):
    """Raised when a dense, spectrum or support size limit is exceeded."""


class TermBudgetError(DimensionLimitError):
    """Raised when a symbolic expansion would exceed the configured term budget."""


class DegenerateDistributionError(TrotterStatsError, ValueError):
    """Raised when a kurtosis is requested for a zero-variance distribution."""


class InvalidTableauError(TrotterStatsError, ValueError):
    """Raised when a Clifford tableau violates the symplectic relations."""


class PartitionError(TrotterStatsError, ValueError):
    """Raised when a Hamiltonian partition is inconsistent with its total."""
