"""Exact rational helpers on top of :class:`fractions.Fraction`.

``Fraction`` already keeps values in lowest terms with a positive
denominator, so it serves directly as the exact rational type.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import DomainError, FormatError

ExactRational = Fraction

_RATIONAL_RE = re.compile(r"^-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?$")


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise DomainError(f"not an exact rational: {value!r}")
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def is_integral(q: Fraction) -> bool:
    return q.denominator == 1


def denominator_exponent(q: Fraction) -> int:
    """Return ``l`` such that the reduced denominator of ``q`` is ``2**l``."""
    if not is_dyadic(q):
        raise DomainError(f"{q} is not dyadic")
    return q.denominator.bit_length() - 1


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; the fraction must already be reduced."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise FormatError(f"malformed rational {text!r}")
    value = Fraction(text)
    if "/" in text:
        _, den = text.split("/")
        if int(den) == 1 or value.denominator != int(den):
            raise FormatError(f"rational {text!r} is not in lowest terms")
    if text == "-0":
        raise FormatError("negative zero is not a canonical rational")
    return value


def format_rational(q: Fraction) -> str:
    return str(q)
