from dataclasses import dataclass
from typing import Optional

from forecast_planner.exceptions import ValidationError
from forecast_planner.utils.constants import Allocator, Method, ScoringVariant

METHOD_ALIASES = {"none": Method.NO_SUPPORT}

ALLOCATOR_FOR_METHOD = {
    Method.NO_RISK: Allocator.NONE,
    Method.NO_SUPPORT: Allocator.NONE,
    Method.RANDOM: Allocator.RANDOM,
    Method.TCGRE: Allocator.TCGRE,
    Method.FORECAST_AWARE: Allocator.FORECAST_AWARE,
}


@dataclass(frozen=True)
class MethodSpec:
    """A planning method, with its scoring variant for forecast-aware support."""

    method: Method
    variant: Optional[ScoringVariant] = None

    @property
    def label(self) -> str:
        if self.method == Method.FORECAST_AWARE:
            variant = self.variant or ScoringVariant.RISK_PATH
            return f"{self.method.value}:{variant.value}"
        return self.method.value

    @property
    def allocator(self) -> Allocator:
        return ALLOCATOR_FOR_METHOD[self.method]

    @classmethod
    def parse(
        cls, text: str, default_variant: Optional[ScoringVariant] = None
    ) -> "MethodSpec":
        """Parse a method label such as ``none`` or ``forecast_aware:<variant>``."""
        name, _, variant_text = text.strip().lower().partition(":")
        try:
            method = METHOD_ALIASES.get(name) or Method(name)
        except ValueError:
            choices = ", ".join([m.value for m in Method] + list(METHOD_ALIASES))
            raise ValidationError(f"Unknown method '{text}' (choose from {choices})")

        if variant_text and method != Method.FORECAST_AWARE:
            raise ValidationError(f"Method '{name}' takes no scoring variant")
        variant = default_variant
        if variant_text:
            try:
                variant = ScoringVariant(variant_text)
            except ValueError:
                choices = ", ".join(v.value for v in ScoringVariant)
                raise ValidationError(
                    f"Unknown scoring variant '{variant_text}' (choose from {choices})"
                )
        if method != Method.FORECAST_AWARE:
            variant = None
        elif variant is None:
            variant = ScoringVariant.RISK_PATH
        return cls(method=method, variant=variant)
