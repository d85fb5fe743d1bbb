"""Exact dyadic-style amounts with power-of-k denominators.

Every quantity the machines exchange is an integer multiple of 1/k^q, so a
signed big integer numerator plus the exponent q represents it exactly.
Canonical form: the numerator is not divisible by k unless the value is
zero (stored as 0/k^0), which makes field equality value equality.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .errors import MixedBase

# Exact numerators can run to thousands of digits; lift CPython's default
# int-to-str cap so serialization does not truncate valid output.
if sys.get_int_max_str_digits() < 500_000:
    sys.set_int_max_str_digits(500_000)


@dataclass(frozen=True, order=False)
class ExactAmount:
    k: int
    numerator: int
    kpow: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise MixedBase(f"base must be >= 2, got {self.k}")
        if self.kpow < 0:
            raise ValueError(f"kpow must be nonnegative, got {self.kpow}")
        num, q = self.numerator, self.kpow
        if num == 0:
            q = 0
        else:
            while q > 0 and num % self.k == 0:
                num //= self.k
                q -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "kpow", q)

    @classmethod
    def zero(cls, k: int) -> "ExactAmount":
        return cls(k, 0, 0)

    @classmethod
    def from_int(cls, value: int, k: int) -> "ExactAmount":
        return cls(k, value, 0)

    def _coerce(self, other) -> "ExactAmount":
        if isinstance(other, ExactAmount):
            if other.k != self.k:
                raise MixedBase(f"cannot combine bases {self.k} and {other.k}")
            return other
        if isinstance(other, int):
            return ExactAmount(self.k, other, 0)
        return NotImplemented

    def __add__(self, other) -> "ExactAmount":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        q = max(self.kpow, o.kpow)
        num = self.numerator * self.k ** (q - self.kpow) + o.numerator * self.k ** (q - o.kpow)
        return ExactAmount(self.k, num, q)

    __radd__ = __add__

    def __neg__(self) -> "ExactAmount":
        return ExactAmount(self.k, -self.numerator, self.kpow)

    def __sub__(self, other) -> "ExactAmount":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "ExactAmount":
        return (-self) + other

    def __mul__(self, other) -> "ExactAmount":
        if isinstance(other, int):
            return ExactAmount(self.k, self.numerator * other, self.kpow)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return ExactAmount(self.k, self.numerator * o.numerator, self.kpow + o.kpow)

    __rmul__ = __mul__

    def div_by_k(self, times: int = 1) -> "ExactAmount":
        if times < 0:
            raise ValueError("times must be nonnegative")
        return ExactAmount(self.k, self.numerator, self.kpow + times)

    def _cmp_key(self, other) -> tuple[int, int]:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare ExactAmount with {type(other).__name__}")
        q = max(self.kpow, o.kpow)
        return (
            self.numerator * self.k ** (q - self.kpow),
            o.numerator * self.k ** (q - o.kpow),
        )

    def __lt__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a > b

    def __ge__(self, other) -> bool:
        a, b = self._cmp_key(other)
        return a >= b

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = ExactAmount(self.k, other, 0)
        if not isinstance(other, ExactAmount):
            return NotImplemented
        return (self.k, self.numerator, self.kpow) == (other.k, other.numerator, other.kpow)

    def __hash__(self) -> int:
        return hash((self.k, self.numerator, self.kpow))

    def __abs__(self) -> "ExactAmount":
        return ExactAmount(self.k, abs(self.numerator), self.kpow)

    def __bool__(self) -> bool:
        return self.numerator != 0

    def is_integer(self) -> bool:
        return self.kpow == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.k**self.kpow)

    def as_kpow_str(self) -> str:
        return f"{self.numerator}/{self.k}^{self.kpow}"

    @classmethod
    def from_kpow_str(cls, text: str, k: int) -> "ExactAmount":
        num_part, _, den_part = text.partition("/")
        base, _, exp = den_part.partition("^")
        if int(base) != k:
            raise MixedBase(f"serialized base {base} != expected {k}")
        return cls(k, int(num_part), int(exp))

    def as_decimal(self, digits: int = 12) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = max(digits + 10, 28)
            return Decimal(self.numerator) / Decimal(self.k) ** self.kpow

    def decimal_str(self, places: int = 12) -> str:
        return f"{self.as_decimal(places + 6):.{places}f}"

    def __str__(self) -> str:
        if self.kpow == 0:
            return str(self.numerator)
        return f"{self.numerator}/{self.k**self.kpow}"
