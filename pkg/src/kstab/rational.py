"""String conversions for exact rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence


def fmt(q) -> str:
    """``"p/q"`` for non-integers, ``"p"`` for integers; never a float."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_vector(v: Iterable) -> str:
    return "(" + ",".join(fmt(x) for x in v) + ")"


def parse_rational(text: str) -> Fraction:
    text = text.strip().replace("−", "-")
    if not text:
        raise ValueError("empty rational")
    # Fraction() also accepts decimals like "0.5", which are exact too.
    return Fraction(text)


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Parse ``"3,-1,-1,-1"`` (optionally parenthesised) into Fractions."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    return tuple(parse_rational(part) for part in text.split(","))


def sup_norm(v: Sequence) -> Fraction:
    return max((abs(Fraction(x)) for x in v), default=Fraction(0))
