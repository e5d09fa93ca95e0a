"""Shared exception types."""


class ConfigError(ValueError):
    """A configuration value violates an invariant (exit code 3 in the CLI)."""


class InvalidEstimateError(RuntimeError):
    """A Monte-Carlo estimate is unusable (exit code 2 in the CLI)."""


class BlowUpError(RuntimeError):
    """The integrator produced a non-finite state."""
