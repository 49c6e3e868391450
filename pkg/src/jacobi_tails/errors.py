"""Exception types shared across the package."""


class JacobiTailsError(Exception):
    """Base class for all package-specific errors."""


class NumericalError(JacobiTailsError):
    """An iterative numerical routine failed to reach its tolerance."""


class ConfigError(JacobiTailsError):
    """An experiment configuration is malformed or violates an invariant."""
