"""Simulator exceptions."""


class SEDError(Exception):
    """Base exception for all simulator errors."""

    pass


class ConfigError(SEDError):
    """Raised when a configuration file or override cannot be parsed."""

    pass


class ValidationError(SEDError):
    """Raised when inputs or configuration values are invalid.

    Attributes:
        errors: List of validation error messages (may contain just one)
    """

    def __init__(self, message: str, errors: list[str] | None = None):
        super().__init__(message)
        self.errors = errors if errors is not None else [message]


class PhysicsError(SEDError):
    """Base for failures of the integrated trajectory itself.

    Attributes:
        state: The electron state at which the failure was detected
    """

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class SingularityError(PhysicsError):
    """Raised when the electron comes closer to the nucleus than the singular radius."""

    pass


class StiffnessError(PhysicsError):
    """Raised when the adaptive step falls below the configured minimum."""

    pass


class KeplerConvergenceError(SEDError):
    """Raised when the Kepler equation solver does not converge."""

    pass


class CacheRangeError(SEDError):
    """Raised when a field cache is evaluated outside its time window."""

    pass


class SnapshotError(SEDError):
    """Raised when a checkpoint or mode-set snapshot cannot be restored."""

    pass


class OutputError(SEDError):
    """Raised when an output directory cannot be prepared or written."""

    pass
