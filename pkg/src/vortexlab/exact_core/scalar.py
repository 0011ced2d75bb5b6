"""Exact scalars: rationals (``fractions.Fraction``) and Gaussian rationals.

A purely real value is always represented by a plain ``Fraction``; the
``GaussianRational`` class only ever holds values with a nonzero imaginary
part.  Arithmetic between the two types is closed and normalizes back to a
``Fraction`` whenever the imaginary part cancels.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Union

import mpmath

Scalar = Union[Fraction, "GaussianRational"]


class GaussianRational:
    """The value ``re + im*i`` with rational parts and ``im != 0``.

    Use :func:`gaussian` to construct values; it returns a ``Fraction``
    when the imaginary part vanishes.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction, im: Fraction):
        self.re = re
        self.im = im

    def __repr__(self) -> str:
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self) -> str:
        return format_scalar(self)

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return gaussian(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return gaussian(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return gaussian(self.re * other.re - self.im * other.im,
                            self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Fraction)):
            return gaussian(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.norm()
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a Gaussian rational by zero")
            return GaussianRational(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result: Scalar = Fraction(1)
        base: Scalar = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


I = GaussianRational(Fraction(0), Fraction(1))
ZERO = Fraction(0)
ONE = Fraction(1)


def gaussian(re, im=0) -> Scalar:
    """Build ``re + im*i``, returning a plain ``Fraction`` when ``im == 0``."""
    re, im = Fraction(re), Fraction(im)
    if im == 0:
        return re
    return GaussianRational(re, im)


def as_scalar(x) -> Scalar:
    if isinstance(x, GaussianRational):
        return x if x.im else x.re
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, complex):
        raise TypeError("floating-point complex values are not exact scalars")
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot interpret {x!r} as an exact scalar")


def real_part(x: Scalar) -> Fraction:
    return x.re if isinstance(x, GaussianRational) else Fraction(x)


def imag_part(x: Scalar) -> Fraction:
    return x.im if isinstance(x, GaussianRational) else Fraction(0)


def conjugate(x: Scalar) -> Scalar:
    return x.conjugate() if isinstance(x, GaussianRational) else x


def is_real(x: Scalar) -> bool:
    return not isinstance(x, GaussianRational) or x.im == 0


def _fmt_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _compact(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    """Render as ``"num/den"`` or ``"a/b+c/di"`` (unit denominators omitted)."""
    if isinstance(x, GaussianRational):
        im = abs(x.im)
        ims = "" if im == 1 else _compact(im)
        if x.re == 0:
            return f"{'-' if x.im < 0 else ''}{ims}i"
        return f"{_compact(x.re)}{'-' if x.im < 0 else '+'}{ims}i"
    return _compact(Fraction(x))


_RAT = r"[+-]?\d+(?:/\d+)?"


def parse_scalar(text: str) -> Scalar:
    """Parse ``"3"``, ``"-2/5"``, ``"1/2+3/4i"``, ``"-i"`` or ``"2/3i"``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if not s.endswith("i"):
        if not re.fullmatch(_RAT, s):
            raise ValueError(f"malformed rational {text!r}")
        return Fraction(s)
    body = s[:-1]
    # split at the last sign that is not the leading one
    cut = max(body.rfind("+", 1), body.rfind("-", 1))
    if cut > 0 and body[cut - 1] != "/":
        re_txt, im_txt = body[:cut], body[cut:]
    else:
        re_txt, im_txt = "0", body
    if im_txt in ("", "+"):
        im_txt = "1"
    elif im_txt == "-":
        im_txt = "-1"
    im_txt = im_txt.rstrip("*")
    for part in (re_txt, im_txt):
        if not re.fullmatch(_RAT, part):
            raise ValueError(f"malformed Gaussian rational {text!r}")
    return gaussian(Fraction(re_txt), Fraction(im_txt))


def scalar_to_json(x: Scalar):
    if isinstance(x, GaussianRational):
        return [_fmt_fraction(x.re), _fmt_fraction(x.im)]
    return _fmt_fraction(Fraction(x))


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, list):
        if len(obj) != 2:
            raise ValueError("Gaussian coefficient must be a [re, im] pair")
        return gaussian(Fraction(obj[0]), Fraction(obj[1]))
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        return Fraction(obj)
    raise ValueError(f"bad scalar document {obj!r}")


def to_mp(x: Scalar):
    """Convert to an mpmath number at the current working precision."""
    if isinstance(x, GaussianRational):
        return mpmath.mpc(mpmath.mpf(x.re.numerator) / x.re.denominator,
                          mpmath.mpf(x.im.numerator) / x.im.denominator)
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator
