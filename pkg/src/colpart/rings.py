"""Exact coefficient rings: ℚ, ℤ and prime fields 𝔽_p.

Ring elements are plain Python values (``int`` for ℤ and 𝔽_p, where 𝔽_p
values are kept reduced into ``0..p-1``; ``Fraction`` for ℚ). A
:class:`Ring` carries the arithmetic and the parsing/formatting rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import UsageError

Scalar = Union[int, Fraction]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class Ring:
    kind: str  # "Q", "Z" or "F"
    p: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("Q", "Z", "F"):
            raise UsageError(f"unknown ring kind {self.kind!r}")
        if self.kind == "F" and not _is_prime(self.p):
            raise UsageError(f"F:{self.p} is not a prime field")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "F" else 0

    def __str__(self) -> str:
        return f"F:{self.p}" if self.kind == "F" else self.kind

    def __call__(self, x: Scalar) -> Scalar:
        """Coerce an integer (or, for ℚ, a fraction) into the ring."""
        if self.kind == "F":
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise UsageError(f"{x} is not defined mod {self.p}")
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            return int(x) % self.p
        if self.kind == "Z":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise UsageError(f"{x} is not an integer")
                return int(x.numerator)
            return int(x)
        return Fraction(x)

    @property
    def zero(self) -> Scalar:
        return self(0)

    @property
    def one(self) -> Scalar:
        return self(1)

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        s = a + b
        return s % self.p if self.kind == "F" else s

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        s = a - b
        return s % self.p if self.kind == "F" else s

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        s = a * b
        return s % self.p if self.kind == "F" else s

    def neg(self, a: Scalar) -> Scalar:
        return (-a) % self.p if self.kind == "F" else -a

    def inv(self, a: Scalar) -> Scalar:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "F":
            return pow(int(a), -1, self.p)
        if self.kind == "Z":
            if a not in (1, -1):
                raise ZeroDivisionError(f"{a} is not a unit in Z")
            return a
        return 1 / Fraction(a)

    def power(self, a: Scalar, e: int) -> Scalar:
        # 0**0 == 1 by the empty-product convention
        if self.kind == "F":
            return pow(int(a), e, self.p)
        return a**e

    def parse(self, text: str) -> Scalar:
        """Parse ``"2"``, ``"-1"``, ``"2/3"`` (ℚ, or 𝔽_p when the denominator is invertible)
        or ``"4 mod 7"``."""
        text = text.strip()
        if " mod " in text:
            value, _, modulus = text.partition(" mod ")
            if self.kind != "F" or int(modulus) != self.p:
                raise UsageError(f"{text!r} does not live in {self}")
            return self(int(value))
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cannot parse {text!r} as an element of {self}") from None
        if value.denominator != 1 and self.kind == "Z":
            raise UsageError(f"{text!r} is not an integer")
        return self(value)

    def format(self, a: Scalar) -> str:
        if self.kind == "F":
            return f"{int(a)} mod {self.p}"
        return str(a)


QQ = Ring("Q")
ZZ = Ring("Z")


def GF(p: int) -> Ring:
    return Ring("F", p)


def parse_ring(spec: str) -> Ring:
    """``Q``, ``Z`` or ``F:p``."""
    spec = spec.strip()
    if spec in ("Q", "Z"):
        return Ring(spec)
    if spec.startswith("F:"):
        try:
            return Ring("F", int(spec[2:]))
        except ValueError:
            raise UsageError(f"bad ring spec {spec!r}") from None
    raise UsageError(f"bad ring spec {spec!r}; expected Q, Z or F:p")
