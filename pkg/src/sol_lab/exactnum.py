"""Exact arithmetic in real quadratic fields Q(sqrt(D)).

Elements are stored as ``u + v*sqrt(D)`` with :class:`fractions.Fraction`
coefficients and a square-free radicand ``D``.
"""

from __future__ import annotations

import decimal
from fractions import Fraction
from functools import total_ordering
from typing import Union

from .errors import DomainError

Rational = Union[int, Fraction]

__all__ = ["QuadRat", "quad_arith", "quad_to_float", "squarefree_split"]


def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(k, core)`` with ``n == k*k*core`` and ``core`` square-free."""
    if n <= 0:
        raise DomainError(f"radicand must be positive, got {n}")
    k, core = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            core *= p
        p += 1 if p == 2 else 2
    core *= rest
    return k, core


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@total_ordering
class QuadRat:
    """An element ``u + v*sqrt(D)`` of the real quadratic field Q(sqrt(D)).

    ``D`` is reduced to its square-free part on construction, with the
    square factor folded into ``v``.  Perfect squares are rejected.
    """

    __slots__ = ("_u", "_v", "_D")

    def __init__(self, u: Rational | str = 0, v: Rational | str = 0, D: int = 5) -> None:
        if not isinstance(D, int) or isinstance(D, bool):
            raise TypeError("D must be an int")
        k, core = squarefree_split(D)
        if core == 1:
            raise DomainError(f"D={D} is a perfect square")
        self._u = _as_fraction(u)
        self._v = _as_fraction(v) * k
        self._D = core

    @classmethod
    def _raw(cls, u: Fraction, v: Fraction, D: int) -> QuadRat:
        obj = object.__new__(cls)
        obj._u, obj._v, obj._D = u, v, D
        return obj

    @property
    def u(self) -> Fraction:
        return self._u

    @property
    def v(self) -> Fraction:
        return self._v

    @property
    def D(self) -> int:
        return self._D

    def _coerce(self, other) -> QuadRat:
        if isinstance(other, QuadRat):
            if other._D != self._D:
                raise DomainError(f"cannot combine Q(sqrt({self._D})) with Q(sqrt({other._D}))")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadRat._raw(Fraction(other), Fraction(0), self._D)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadRat._raw(self._u + o._u, self._v + o._v, self._D)

    __radd__ = __add__

    def __neg__(self) -> QuadRat:
        return QuadRat._raw(-self._u, -self._v, self._D)

    def __pos__(self) -> QuadRat:
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadRat._raw(self._u - o._u, self._v - o._v, self._D)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        u = self._u * o._u + self._v * o._v * self._D
        v = self._u * o._v + self._v * o._u
        return QuadRat._raw(u, v, self._D)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``u^2 - v^2 D``; zero only for the zero element."""
        return self._u * self._u - self._v * self._v * self._D

    def trace(self) -> Fraction:
        return 2 * self._u

    def conjugate(self) -> QuadRat:
        """Galois conjugate ``u - v*sqrt(D)``."""
        return QuadRat._raw(self._u, -self._v, self._D)

    def inverse(self) -> QuadRat:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt(D))")
        return QuadRat._raw(self._u / n, -self._v / n, self._D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int) -> QuadRat:
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = QuadRat._raw(Fraction(1), Fraction(0), self._D)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sign(self) -> int:
        """Exact sign of ``u + v*sqrt(D)`` from rational comparisons only."""
        su = (self._u > 0) - (self._u < 0)
        sv = (self._v > 0) - (self._v < 0)
        if sv == 0:
            return su
        if su == 0 or su == sv:
            return sv
        # opposite signs: the larger magnitude wins
        cmp = self._u * self._u - self._v * self._v * self._D
        return su if cmp > 0 else sv

    def is_rational(self) -> bool:
        return self._v == 0

    def is_integer(self) -> bool:
        return self._v == 0 and self._u.denominator == 1

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadRat):
            return self._D == other._D and self._u == other._u and self._v == other._v
        if isinstance(other, (int, Fraction)):
            return self._v == 0 and self._u == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self._v == 0:
            return hash(self._u)
        return hash((self._u, self._v, self._D))

    def __bool__(self) -> bool:
        return bool(self._u) or bool(self._v)

    def __float__(self) -> float:
        return float(quad_to_float(self, 30))

    def __repr__(self) -> str:
        return f"QuadRat({str(self._u)!r}, {str(self._v)!r}, D={self._D})"

    def __str__(self) -> str:
        if self._v == 0:
            return str(self._u)
        return f"{self._u} + {self._v}*sqrt({self._D})"

    def to_json(self) -> dict:
        return {"u": str(self._u), "v": str(self._v), "D": self._D}

    @classmethod
    def from_json(cls, obj: dict) -> QuadRat:
        return cls(Fraction(obj["u"]), Fraction(obj["v"]), int(obj["D"]))


def quad_arith(lhs: QuadRat, rhs: QuadRat, op: str) -> QuadRat:
    """Apply one of ``add``, ``sub``, ``mul``, ``div`` exactly."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise DomainError(f"unknown operation {op!r}")


def _frac_to_dec(x: Fraction, ctx: decimal.Context) -> decimal.Decimal:
    return ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))


def quad_to_float(x: QuadRat, precision: int = 30) -> decimal.Decimal:
    """Decimal approximation of ``x`` to ``precision`` significant digits.

    When ``u`` and ``v*sqrt(D)`` have opposite signs the value is evaluated
    as ``norm / (u - v*sqrt(D))`` so no digits are lost to cancellation.
    The sign of the result always equals :meth:`QuadRat.sign`.
    """
    if precision < 15:
        raise DomainError("precision must be at least 15 digits")
    if not x:
        return decimal.Decimal(0)
    guard = decimal.Context(prec=precision + 12)
    root = guard.sqrt(decimal.Decimal(x.D))
    u = _frac_to_dec(x.u, guard)
    v = _frac_to_dec(x.v, guard)
    if x.u * x.v >= 0:
        val = guard.add(u, guard.multiply(v, root))
    else:
        denom = guard.subtract(u, guard.multiply(v, root))
        val = guard.divide(_frac_to_dec(x.norm(), guard), denom)
    out = decimal.Context(prec=precision).plus(val)
    assert (out > 0) - (out < 0) == x.sign()
    return out

