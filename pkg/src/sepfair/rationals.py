"""Parsing and formatting of exact rational numbers.

All numeric data in this library is `fractions.Fraction`: arbitrary
precision, always in lowest terms, with a positive denominator.  Floats are
rejected in instance data on purpose; they only appear in optional CLI
display output.
"""

from fractions import Fraction

from .errors import InputError


def frac(x) -> Fraction:
    """Convert ``x`` (int, Fraction, or a string like ``"6/5"``) exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {x!r}") from exc
    if isinstance(x, float):
        raise InputError(
            f"refusing float {x!r}: rational strings like '1/3' are required"
        )
    raise InputError(f"cannot interpret {x!r} as a rational number")


def fmt(q: Fraction) -> str:
    """Render a Fraction as ``"num/den"``, or just ``"num"`` for integers."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
