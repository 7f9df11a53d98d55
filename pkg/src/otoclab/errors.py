"""Shared exception types and the warning channel for numerical repairs."""


class SpaceMismatchError(ValueError):
    """Operands live on different composite spaces."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent (CLI exit code 2)."""


class ResourceError(RuntimeError):
    """A request exceeds the memory budget or the output location is unusable
    (CLI exit code 3)."""


class NumericalValidationError(RuntimeError):
    """Two independently computed paths for the same quantity disagree beyond
    tolerance (CLI exit code 4)."""


class PsdClampWarning(UserWarning):
    """A density matrix carried tiny negative eigenvalues that were clamped."""
