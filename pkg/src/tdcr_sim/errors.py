"""Exception types raised by the simulator."""


class TdcrError(Exception):
    """Base class for all simulator errors."""


class InvalidArgumentError(TdcrError, ValueError):
    pass


class DegenerateRotationError(TdcrError, ValueError):
    pass


class SingularSystemError(TdcrError):
    """A linear system was too ill-conditioned to solve.

    ``condition`` carries the condition estimate, ``node`` the arc-length node
    index when raised from inside a spatial sweep.
    """

    def __init__(self, message, condition=float("inf"), node=None):
        super().__init__(message)
        self.condition = condition
        self.node = node


class SingularTendonPathError(TdcrError):
    pass


class DivergenceError(TdcrError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NonConvergenceError(TdcrError):
    def __init__(self, message, residual=float("nan"), iteration=None):
        super().__init__(message)
        self.residual = residual
        self.iteration = iteration


class UncontrollableConfigurationError(TdcrError):
    pass


class InsufficientDataError(TdcrError, ValueError):
    pass


class ConfigError(TdcrError, ValueError):
    """Configuration validation failure; ``problems`` lists (key_path, message)."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = [f"{key}: {msg}" for key, msg in self.problems]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))


class TraceParseError(TdcrError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line
