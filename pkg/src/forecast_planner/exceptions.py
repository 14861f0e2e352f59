"""
Custom exceptions for the planner.
"""


class PlannerError(Exception):
    """Base class for every error raised by the planning pipeline."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class ValidationError(PlannerError):
    """Raised when a single field value fails validation."""

    pass


class GraphValidationError(PlannerError):
    """Raised when graph text or generator arguments violate a graph invariant."""

    pass


class ScenarioValidationError(PlannerError):
    """Raised when a scenario or suite grid document is invalid."""

    pass


class EnumerationLimitError(PlannerError):
    """Raised when brute-force path enumeration would exceed its guard."""

    def __init__(self, paths: int, limit: int):
        super().__init__(
            f"Enumeration of {paths} edge sequences exceeds the limit of {limit}"
        )
        self.paths = paths
        self.limit = limit


class SearchSpaceLimitError(PlannerError):
    """Raised when the exhaustive planner would exceed its state bound."""

    def __init__(self, states: int, limit: int):
        super().__init__(
            f"Exhaustive search over {states} joint states exceeds the limit of {limit}"
        )
        self.states = states
        self.limit = limit
