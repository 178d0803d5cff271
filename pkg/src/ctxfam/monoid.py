"""Exact arithmetic over the three annotation monoids.

Every relation in this package carries annotations drawn from one of three
commutative monoids:

* ``B``  -- the Booleans ({0, 1}, or, 0); plain presence/absence,
* ``N``  -- the naturals (N, +, 0); multiplicities,
* ``Q``  -- the non-negative rationals (Q>=0, +, 0); exact weights.

All three are *positive*: a + b = 0 forces a = b = 0, so a zero annotation
always means "row absent" and supports stay meaningful under addition.
``N`` and ``Q`` are additionally *cancellative* (a + c = b + c implies
a = b); ``B`` is not, since 1 + 1 = 1 + 0.  Several stronger results
downstream (realisability of chordless cycles, cycle decomposition) need
cancellativity, which is why it is exposed as a kind property here.

Arithmetic is exact throughout: ``int`` for B and N, ``fractions.Fraction``
for Q.  No floats ever enter the computation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional


class KindMismatchError(TypeError):
    """Raised when values of different monoid kinds are combined."""


class MonoidKind(enum.Enum):
    """Identifies which annotation monoid a value or relation lives in."""

    B = "B"
    N = "N"
    Q = "Q"

    @property
    def is_cancellative(self) -> bool:
        """True when a + c = b + c implies a = b.  Fails only for B."""
        return self is not MonoidKind.B

    @property
    def is_positive(self) -> bool:
        """True when a + b = 0 implies a = b = 0.  Holds for all three."""
        return True

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MonoidValue:
    """An element of one of the three annotation monoids.

    The payload is an ``int`` for B (restricted to 0/1) and N, and a
    non-negative ``Fraction`` for Q.  Instances are immutable and compare
    by kind and payload.
    """

    kind: MonoidKind
    payload: int | Fraction

    def __post_init__(self) -> None:
        if self.kind is MonoidKind.B:
            if self.payload not in (0, 1) or not isinstance(self.payload, int):
                raise ValueError(f"B value must be 0 or 1, got {self.payload!r}")
        elif self.kind is MonoidKind.N:
            if not isinstance(self.payload, int) or isinstance(self.payload, bool):
                raise ValueError(f"N value must be an int, got {self.payload!r}")
            if self.payload < 0:
                raise ValueError(f"N value must be non-negative, got {self.payload}")
        else:
            if not isinstance(self.payload, Fraction):
                raise ValueError(f"Q value must be a Fraction, got {self.payload!r}")
            if self.payload < 0:
                raise ValueError(f"Q value must be non-negative, got {self.payload}")

    @staticmethod
    def of(kind: MonoidKind, raw: int | Fraction) -> "MonoidValue":
        """Coerce a raw number into the given kind.

        B accepts 0/1 (anything nonzero counts as present for B), N accepts
        non-negative ints, Q accepts ints and Fractions.
        """
        if kind is MonoidKind.B:
            return MonoidValue(kind, 1 if raw else 0)
        if kind is MonoidKind.N:
            if isinstance(raw, Fraction):
                if raw.denominator != 1:
                    raise ValueError(f"N value must be integral, got {raw}")
                raw = raw.numerator
            return MonoidValue(kind, int(raw))
        return MonoidValue(kind, Fraction(raw))

    @staticmethod
    def zero(kind: MonoidKind) -> "MonoidValue":
        return MonoidValue.of(kind, 0)

    @staticmethod
    def one(kind: MonoidKind) -> "MonoidValue":
        return MonoidValue.of(kind, 1)

    @property
    def is_zero(self) -> bool:
        return self.payload == 0

    def __add__(self, other: "MonoidValue") -> "MonoidValue":
        return add(self, other)

    def __str__(self) -> str:
        return str(self.payload)


def _require_same_kind(a: MonoidValue, b: MonoidValue) -> None:
    if a.kind is not b.kind:
        raise KindMismatchError(f"cannot combine {a.kind} value with {b.kind} value")


def add(a: MonoidValue, b: MonoidValue) -> MonoidValue:
    """Monoid addition: or for B, + for N and Q."""
    _require_same_kind(a, b)
    if a.kind is MonoidKind.B:
        return MonoidValue(a.kind, a.payload | b.payload)
    return MonoidValue(a.kind, a.payload + b.payload)


def msum(values: Iterable[MonoidValue], kind: Optional[MonoidKind] = None) -> MonoidValue:
    """Sum of finitely many values; the empty sum needs an explicit kind."""
    total: Optional[MonoidValue] = None
    for v in values:
        total = v if total is None else add(total, v)
    if total is None:
        if kind is None:
            raise ValueError("empty sum needs an explicit kind")
        return MonoidValue.zero(kind)
    return total


def natural_leq(a: MonoidValue, b: MonoidValue) -> bool:
    """The natural preorder: a <= b iff some c satisfies a + c = b.

    For B this is implication (0 <= 1); for N and Q it coincides with the
    numeric order because subtraction of a smaller value stays in the
    monoid.
    """
    _require_same_kind(a, b)
    return a.payload <= b.payload


def subtract(a: MonoidValue, b: MonoidValue) -> MonoidValue:
    """Partial subtraction a - b, defined for cancellative kinds with b <= a.

    B is rejected outright: 1 - 1 would have two candidate results there.
    """
    _require_same_kind(a, b)
    if not a.kind.is_cancellative:
        raise KindMismatchError("subtraction is not defined for B")
    if b.payload > a.payload:
        raise ValueError(f"cannot subtract {b} from {a} within the monoid")
    return MonoidValue(a.kind, a.payload - b.payload)


def parse_value(kind: MonoidKind, text: str) -> MonoidValue:
    """Parse an annotation in the textual family format.

    B takes ``0`` or ``1``; N takes decimal digits; Q takes digits or
    ``p/q`` with a positive denominator.
    """
    text = text.strip()
    if kind is MonoidKind.B:
        if text not in ("0", "1"):
            raise ValueError(f"B annotation must be 0 or 1, got {text!r}")
        return MonoidValue(kind, int(text))
    if kind is MonoidKind.N:
        if not text.isdigit():
            raise ValueError(f"N annotation must be decimal digits, got {text!r}")
        return MonoidValue(kind, int(text))
    if "/" in text:
        num, _, den = text.partition("/")
        if not (num.isdigit() and den.isdigit()) or int(den) == 0:
            raise ValueError(f"Q annotation must be digits or p/q, got {text!r}")
        return MonoidValue(kind, Fraction(int(num), int(den)))
    if not text.isdigit():
        raise ValueError(f"Q annotation must be digits or p/q, got {text!r}")
    return MonoidValue(kind, Fraction(int(text)))


def format_value(value: MonoidValue) -> str:
    """Canonical text for an annotation; inverse of :func:`parse_value`."""
    return str(value.payload)
