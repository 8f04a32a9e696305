"""Exact rationals with an explicit 128-bit component contract, and rate points."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..core.errors import ValidationError

# Numerators and denominators must fit a signed 128-bit integer.
COMPONENT_BITS = 127


class RegionError(ValidationError):
    """Parameters outside the range a region formula is defined for."""


class RationalOverflowError(RegionError, OverflowError):
    """A rational component outgrew the 128-bit contract."""


def checked(value: Fraction | int) -> Fraction:
    fr = Fraction(value)
    if abs(fr.numerator).bit_length() > COMPONENT_BITS or fr.denominator.bit_length() > COMPONENT_BITS:
        raise RationalOverflowError(f"rational {fr} exceeds 128-bit components")
    return fr


def rational(numerator: int, denominator: int = 1) -> Fraction:
    if denominator == 0:
        raise RegionError("zero denominator")
    return checked(Fraction(numerator, denominator))


def parse_rational(text: str) -> Fraction:
    """Parse ``"3/8"`` or ``"3"`` exactly."""
    try:
        return checked(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise RegionError(f"not an exact rational: {text!r}") from exc


@dataclass(frozen=True, slots=True)
class RatePoint:
    """Normalized (storage, bandwidth) pair: alpha/B and beta/B."""

    alpha_bar: Fraction
    beta_bar: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha_bar", checked(self.alpha_bar))
        object.__setattr__(self, "beta_bar", checked(self.beta_bar))
        if self.alpha_bar <= 0 or self.beta_bar <= 0:
            raise RegionError(f"rate point coordinates must be positive, got ({self.alpha_bar}, {self.beta_bar})")

    def dominates(self, other: RatePoint) -> bool:
        """No worse in both coordinates."""
        return self.alpha_bar <= other.alpha_bar and self.beta_bar <= other.beta_bar

    def __str__(self) -> str:
        return f"({self.alpha_bar}, {self.beta_bar})"

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha_bar": str(self.alpha_bar),
            "beta_bar": str(self.beta_bar),
            "alpha_bar_decimal": float(self.alpha_bar),
            "beta_bar_decimal": float(self.beta_bar),
        }
