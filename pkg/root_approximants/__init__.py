"""Self-similar root approximants, Padé baselines and reference oracles."""
from .approximants import (
    AdditiveApproximant, AsymptoticCase, MatchCondition, NestSpec, Offset, RootApproximant, Side,
    evaluate, expand_at_infinity, expand_at_zero, standard_schedule,
)
from .series import GeneralizedSeries
from .solver import Mode, build

__all__ = [
    "AdditiveApproximant", "AsymptoticCase", "GeneralizedSeries", "MatchCondition", "Mode",
    "NestSpec", "Offset", "RootApproximant", "Side", "build", "evaluate", "expand_at_infinity",
    "expand_at_zero", "standard_schedule",
]
