import math
from typing import Any, Callable

from forecast_planner.exceptions import ValidationError


class Validate:
    """Field validators for scenario documents and CLI arguments."""

    @staticmethod
    def required(value: Any) -> Any:
        """Ensure value is not empty."""
        if value is None or (isinstance(value, str) and not value.strip()):
            raise ValidationError("This field is required")
        return value

    @staticmethod
    def integer(value: Any) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"Must be an integer, got {type(value).__name__}")
        return value

    @staticmethod
    def non_negative(value: Any) -> Any:
        if value < 0:
            raise ValidationError(f"Must be >= 0, got {value}")
        return value

    @staticmethod
    def number(value: Any) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"Must be a number, got {type(value).__name__}")
        if not math.isfinite(value):
            raise ValidationError(f"Must be finite, got {value}")
        return float(value)

    @staticmethod
    def positive(value: Any) -> Any:
        if value <= 0:
            raise ValidationError(f"Must be > 0, got {value}")
        return value

    @staticmethod
    def probability(value: Any) -> float:
        number = Validate.number(value)
        if not 0.0 <= number <= 1.0:
            raise ValidationError(f"Probability must be in [0, 1], got {value}")
        return number

    @staticmethod
    def chain(value: Any, *validators: Callable[[Any], Any]) -> Any:
        """Apply multiple validators in sequence."""
        result = value
        for validator in validators:
            result = validator(result)
        return result


def validate_node_id(value: Any) -> int:
    """Validate a node index: a non-negative integer."""
    return Validate.chain(
        value, Validate.required, Validate.integer, Validate.non_negative
    )


def validate_timeout(value: Any) -> float:
    return Validate.chain(value, Validate.number, Validate.positive)


def validate_trials(value: Any) -> int:
    return Validate.chain(value, Validate.integer, Validate.positive)
