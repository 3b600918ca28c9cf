"""Exact rational arithmetic backend.

All processing times, values, and LP coefficients are exact rationals
end to end; floats appear only in statistics reporting.  The default
backend is gmpy2.mpq (fast); set BICRIT_PURE_RATIONAL=1 to force the
stdlib Fraction fallback.
"""

import os
from fractions import Fraction

if os.environ.get("BICRIT_PURE_RATIONAL"):
    Rat = Fraction
else:
    try:
        from gmpy2 import mpq as Rat
    except ImportError:  # pragma: no cover
        Rat = Fraction

ZERO = Rat(0)
ONE = Rat(1)


def rat(x):
    """Coerce an int, 'p/q' string, Fraction, or mpq to the Rat backend.

    Floats are rejected: they silently lose exactness.
    """
    if isinstance(x, float):
        raise TypeError(f"refusing to build an exact rational from float {x!r}")
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    return Rat(x)


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool) or type(x) is Rat


def rat_str(x) -> str:
    """Canonical text form: 'n' for integers, 'p/q' otherwise."""
    return str(Rat(x))


def parse_rat(text: str):
    """Parse 'p/q' or integer text into a Rat.  Raises ValueError on junk."""
    return Rat(text.strip())


def rat_json(x):
    """JSON encoding per the instance file format: int when integral, else 'p/q'."""
    q = Rat(x)
    if q.denominator == 1:
        return int(q)
    return str(q)
