"""Exception types shared across the toolkit.

Each error carries enough context for the CLI to pick an exit code and for
Monte Carlo harnesses to count failures instead of aborting.
"""


class ParameterError(ValueError):
    """Raised when a numeric parameter is outside the range a formula accepts."""

    def __init__(self, message: str, parameter: str | None = None) -> None:
        super().__init__(message)
        self.parameter = parameter


class DimensionError(ValueError):
    """Raised when a vector or matrix does not match the network architecture."""

    def __init__(self, message: str, expected: int | None = None, actual: int | None = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class EmptyDomainError(ValueError):
    """Raised when an operation needs at least one input vector."""


class SamplingRangeError(ValueError):
    """Raised when a uniform variate lies outside [0, 1]."""


class CoverageError(ValueError):
    """Raised when the golden-ratio decomposition needs an interval with no sample."""

    def __init__(self, message: str, interval: int) -> None:
        super().__init__(message)
        self.interval = interval


class UnsupportedArchitectureError(ValueError):
    """Raised when the construction is asked to handle non-ReLU layers."""


class NetworkFormatError(ValueError):
    """Raised when a network JSON file or binary container cannot be decoded."""


class ResourceError(ValueError):
    """Raised when an enumeration would exceed the supported size."""


class PruningFailure(RuntimeError):
    """Raised when the sampled large network cannot represent the target.

    This is the probability-delta event of the sampling bounds, so it is
    recoverable: callers running many seeds count it rather than crash.
    """

    def __init__(
        self,
        message: str,
        layer: int,
        pair: tuple[int, int] | None = None,
        category: str | None = None,
        mode: str | None = None,
        neurons_consumed: int | None = None,
    ):
        super().__init__(message)
        self.layer = layer
        self.pair = pair
        self.category = category
        self.mode = mode
        self.neurons_consumed = neurons_consumed
