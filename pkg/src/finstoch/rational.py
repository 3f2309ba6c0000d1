"""Exact rational values and their "num/den" wire format.

All probabilities, distances and integrals in this package are
:class:`fractions.Fraction` instances; nothing is ever rounded.  Files
carry rationals as strings like ``"1/3"`` or ``"2"`` so that round trips
are bit-exact.
"""

from fractions import Fraction

__all__ = ["Rational", "parse_rational", "format_rational"]

Rational = Fraction


def parse_rational(text):
    """Parse a ``"num/den"`` or ``"num"`` string into a Fraction.

    Raises ValueError on malformed input, including zero denominators.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected rational string, got {type(text).__name__}")
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            n, d = int(num), int(den)
        except ValueError:
            raise ValueError(f"malformed rational {text!r}") from None
        if d == 0:
            raise ValueError(f"zero denominator in rational {text!r}")
        return Fraction(n, d)
    try:
        return Fraction(int(s))
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None


def format_rational(value):
    """Format a Fraction as ``"num/den"``, or ``"num"`` for integers."""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
