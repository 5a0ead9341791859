"""Exception types shared across the package."""


class GcgtError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(GcgtError, ValueError):
    """A parameter violates its documented precondition."""


class GraphFormatError(GcgtError, ValueError):
    """A graph or test-collection file does not match the text format."""


class BudgetExceededError(GcgtError):
    """The projected enumeration work exceeds the safety budget."""


class RejectionExhaustedError(GcgtError):
    """A rejection-sampling generator hit its restart cap."""


class MixingTimeError(GcgtError):
    """The walk distribution failed to reach the target distance in time."""
