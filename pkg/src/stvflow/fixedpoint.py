"""Fixed-point decimal arithmetic for vote weights and transfer values.

Every weight and running total in a count is kept at a fixed number of
decimal places, so repeated tabulation of the same profile is bit-identical
across platforms. Truncation (round toward zero) is the statutory Scottish
behaviour; round-half-up reproduces the arithmetic printed in election
summaries that display two decimal places.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_DOWN, ROUND_HALF_UP, Decimal

__all__ = ["Precision", "PAPER_PRECISION", "ZERO", "ONE", "fmt"]

_ROUNDING = {
    "truncate": ROUND_DOWN,
    "round": ROUND_HALF_UP,
}

ZERO = Decimal(0)
ONE = Decimal(1)


@dataclass(frozen=True)
class Precision:
    """Quantization policy: number of decimal places and rounding mode."""

    places: int = 5
    mode: str = "truncate"

    def __post_init__(self) -> None:
        if not 2 <= self.places <= 9:
            raise ValueError(f"decimal places must be in [2, 9], got {self.places}")
        if self.mode not in _ROUNDING:
            raise ValueError(f"mode must be one of {sorted(_ROUNDING)}, got {self.mode!r}")

    @property
    def quantum(self) -> Decimal:
        return Decimal(1).scaleb(-self.places)

    def quantize(self, value: Decimal) -> Decimal:
        return value.quantize(self.quantum, rounding=_ROUNDING[self.mode])


#: Two places, round half up: the arithmetic used by published two-decimal
#: election summaries (e.g. a 0.17058... transfer value printed as 0.17).
PAPER_PRECISION = Precision(places=2, mode="round")


def fmt(value: Decimal | int) -> str:
    """Render a quantized decimal without trailing zeros ('1.00' -> '1')."""
    text = format(Decimal(value), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"
