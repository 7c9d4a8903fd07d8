"""Exception hierarchy shared across the package."""


class RelayStopError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(RelayStopError, ValueError):
    """A numeric argument or configuration field is out of its valid range."""


class InvalidStateError(RelayStopError, RuntimeError):
    """An operation was called on data that is missing a required part."""


class PolicyMismatchError(RelayStopError, ValueError):
    """A decision function was called with a policy of the wrong kind."""


class ContentionDeadlockError(RelayStopError, RuntimeError):
    """Contention cannot succeed (zero success probability or slot cap hit)."""


class SolverFailureError(RelayStopError, RuntimeError):
    """Root bracketing or bisection failed; carries diagnostic context."""


class CappedPacketError(RelayStopError, RuntimeError):
    """A simulated packet exceeded its observation cap (never-stop guard)."""


class InsufficientDataError(RelayStopError, ValueError):
    """Not enough samples to form the requested estimate."""


class ConfigError(RelayStopError, ValueError):
    """A configuration file or CLI override is malformed."""
