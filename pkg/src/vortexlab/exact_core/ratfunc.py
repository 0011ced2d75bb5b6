"""Reduced rational functions ``num/den`` in one tagged variable."""

from __future__ import annotations

from typing import Mapping

from .poly import GaussianRational, Poly, TagMismatch, poly_gcd
from .scalar import Fraction, Scalar, as_scalar


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, GaussianRational))


class RationalFunction:
    """``num/den`` with ``gcd(num, den) = 1`` and monic ``den``.

    For Laurent tags both parts are shifted to nonnegative exponents before
    reduction, so a power of the variable sits in whichever part needs it.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, var: str | None = None):
        if not isinstance(num, Poly):
            num = Poly.const(num, var or (den.var if isinstance(den, Poly) else "z"))
        if den is None:
            den = Poly.const(1, num.var)
        elif not isinstance(den, Poly):
            den = Poly.const(den, num.var)
        if num.var != den.var:
            raise TagMismatch("numerator and denominator tags differ")
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            self.num, self.den = num, Poly.const(1, num.var)
            return
        k = min(num.low, den.low)
        if k:
            num, den = num.shift(-k), den.shift(-k)
        g = poly_gcd(num, den)
        if g.degree:
            num, den = num.exact_div(g), den.exact_div(g)
        lc = den.lead
        if lc != 1:
            inv = 1 / lc
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RationalFunction":
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def from_poly(cls, p: Poly) -> "RationalFunction":
        if p.is_zero or p.low >= 0:
            return cls._raw(p, Poly.const(1, p.var))
        return cls(p)

    @property
    def var(self) -> str:
        return self.num.var

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self) -> bool:
        return not self.num.is_zero

    def is_polynomial(self) -> bool:
        return self.den.is_const

    def as_poly(self) -> Poly:
        """The value as a Laurent polynomial, when the denominator is a monomial."""
        if self.den.is_const:
            return self.num.scale(1 / self.den.const_value())
        if len(self.den.exponents()) == 1 and self.var in ("w", "xi"):
            (e, v), = self.den.items()
            return self.num.shift(-e).scale(1 / v)
        raise ValueError("rational function is not a (Laurent) polynomial")

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.var != self.var:
                raise TagMismatch("variable tags differ")
            return other
        if isinstance(other, Poly):
            if other.var != self.var:
                raise TagMismatch("variable tags differ")
            return RationalFunction.from_poly(other)
        if _is_scalar(other):
            return RationalFunction._raw(Poly.const(other, self.var), Poly.const(1, self.var))
        return NotImplemented

    def __eq__(self, other) -> bool:
        o = self._coerce(other) if not isinstance(other, RationalFunction) else other
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._raw(-self.num, self.den)

    def __add__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other) -> "RationalFunction":
        if _is_scalar(other):
            c = as_scalar(other)
            if not c:
                return RationalFunction(Poly(None, self.var))
            return RationalFunction._raw(self.num.scale(c), self.den)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero:
            raise ZeroDivisionError("inverse of the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other) -> "RationalFunction":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction._raw(self.num ** n, self.den ** n)

    def diff(self, times: int = 1) -> "RationalFunction":
        r = self
        for _ in range(times):
            r = RationalFunction(r.num.diff() * r.den - r.num * r.den.diff(), r.den * r.den)
        return r

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def to_json(self) -> dict:
        return {"numerator": self.num.to_json(), "denominator": self.den.to_json()}

    @classmethod
    def from_json(cls, doc: Mapping) -> "RationalFunction":
        return cls(Poly.from_json(doc["numerator"]), Poly.from_json(doc["denominator"]))


def as_rational(x, var: str = "z") -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Poly):
        return RationalFunction.from_poly(x)
    return RationalFunction(Poly.const(as_scalar(x), var))


def log_diff_poly(p: Poly) -> RationalFunction:
    """``p'/p`` with the tag-aware derivative."""
    return RationalFunction(p.diff(), p)


__all__ = ["RationalFunction", "as_rational", "log_diff_poly", "Scalar"]
