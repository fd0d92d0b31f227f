"""Exception types shared across the package."""


class EislabError(Exception):
    """Base class for all package errors."""


class DomainError(EislabError):
    """Inputs outside the mathematical domain (negative utilities, bad parameters)."""


class DistributionError(EislabError):
    """Malformed finite distribution (probabilities, support, dimensions)."""


class NonConvergenceError(EislabError):
    """An iterative routine failed to reach its tolerance."""


class NonHomotheticError(EislabError):
    """A setting does not satisfy the linear-value-function hypotheses."""


class GridRangeError(EislabError):
    """Evaluation left the tabulated wealth range."""


class KinkError(EislabError):
    """Smoothness lost at a policy kink; carries the offending location."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


class ShockCompatibilityError(EislabError):
    """Shock applied to a setting lacking the required block."""


class ConfigError(EislabError):
    """Configuration file failed to parse or validate."""
