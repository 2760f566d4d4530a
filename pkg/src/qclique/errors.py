"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class CliqueOracleError(Exception):
    """Base class for all errors raised by this package."""


class GraphParseError(CliqueOracleError, ValueError):
    """Malformed graph input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SelfLoopError(GraphParseError):
    pass


class NodeRangeError(GraphParseError):
    pass


class WidthMismatchError(CliqueOracleError, ValueError):
    pass


class CapabilityError(CliqueOracleError):
    """A request exceeds a documented size limit (simulator width, brute force)."""


class WidthLimitError(CapabilityError):
    pass


class BruteForceLimitError(CapabilityError):
    pass


class InsufficientWorkspaceError(CliqueOracleError, ValueError):
    pass


class NoMarkedStatesError(CliqueOracleError):
    """Raised when the marked count M is zero.

    ``estimate`` carries the counting result that led to the failure, if any.
    """

    def __init__(self, message, estimate=None):
        self.estimate = estimate
        super().__init__(message)


class CountRequiredError(CliqueOracleError):
    """The marked count M is unknown and classical fallback is disabled."""
