"""Scalar backend: exact rationals plus a tolerance-aware float mode.

All model data (coordinates, probabilities, radii) is stored as exact
rationals.  Engines run either fully exact or in binary64 with a global
tolerance; the switch is carried by a :class:`NumericContext` so the same
algorithm code serves both modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a normal dependency
    Q = Fraction

DEFAULT_EPS = 1e-9

ZERO = Q(0)
ONE = Q(1)


def rat(value) -> Q:
    """Exact rational from int, float, rational, or string ("a/b" or decimal)."""
    if isinstance(value, str):
        try:
            return Q(value)
        except ValueError:
            f = Fraction(value)
            return Q(f.numerator, f.denominator)
    if isinstance(value, float):
        f = Fraction(value)  # exact binary64 value
        return Q(f.numerator, f.denominator)
    return Q(value)


def rat_str(q) -> str:
    """Canonical "a/b" (or plain integer) rendering."""
    return str(Q(q))


def sign(x) -> int:
    """Exact sign in {-1, 0, +1}."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


@dataclass(frozen=True)
class NumericContext:
    """Per-run numeric mode: 'exact' rationals or 'float' with tolerance eps."""

    mode: str = "exact"
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown numeric mode {self.mode!r}")

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def scalar(self, q):
        """Convert a stored rational to this context's working scalar."""
        return q if self.exact else float(q)

    def point(self, coords):
        return tuple(coords) if self.exact else tuple(float(c) for c in coords)

    def sign(self, x) -> int:
        if self.exact:
            return sign(x)
        if abs(x) <= self.eps:
            return 0
        return 1 if x > 0 else -1

    def zero(self):
        return ZERO if self.exact else 0.0

    def one(self):
        return ONE if self.exact else 1.0


EXACT = NumericContext("exact")
FLOAT = NumericContext("float")
