"""Deterministic number formatting shared by every serialized artifact."""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal

PRECISION = 6
_QUANTUM = Decimal(1).scaleb(-PRECISION)


def fmt_real(value: float) -> str:
    """Render ``value`` with six decimals, rounding half to even."""
    return str(Decimal(repr(float(value))).quantize(_QUANTUM, rounding=ROUND_HALF_EVEN))


def round_real(value: float) -> float:
    return float(fmt_real(value))
