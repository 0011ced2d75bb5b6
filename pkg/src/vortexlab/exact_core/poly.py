"""Univariate (Laurent) polynomials over exact scalars.

The variable tag fixes how the derivative with respect to the physical
coordinate ``z`` acts:

* ``"z"`` (and the auxiliary ``"x"``): ordinary polynomials, exponents >= 0;
* ``"w"``: ``z = w**2``, so ``d/dz = (2w)**-1 d/dw``; negative exponents allowed;
* ``"xi"``: ``xi = exp(i z)``, so ``d/dz = i xi d/dxi``; Laurent.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .scalar import I, GaussianRational, Scalar, as_scalar, format_scalar, scalar_from_json, scalar_to_json

VARIABLES = ("z", "w", "xi", "x")
LAURENT = ("w", "xi")

_ZERO = Fraction(0)
_ONE = Fraction(1)


class TagMismatch(ValueError):
    pass


class InexactDivision(ArithmeticError):
    pass


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, GaussianRational))


class Poly:
    """Immutable sparse Laurent polynomial ``sum c_e * var**e``."""

    __slots__ = ("_c", "var")

    def __init__(self, coeffs: Mapping[int, object] | Iterable | None = None, var: str = "z"):
        if var not in VARIABLES:
            raise ValueError(f"unknown variable tag {var!r}")
        c: dict[int, Scalar] = {}
        if coeffs is None:
            pass
        elif isinstance(coeffs, Mapping):
            for e, v in coeffs.items():
                v = as_scalar(v)
                if v:
                    c[int(e)] = v
        else:
            for e, v in enumerate(coeffs):
                v = as_scalar(v)
                if v:
                    c[e] = v
        if var not in LAURENT and any(e < 0 for e in c):
            raise ValueError(f"negative exponent in a polynomial in {var}")
        self._c = c
        self.var = var

    @classmethod
    def _raw(cls, c: dict, var: str) -> "Poly":
        p = object.__new__(cls)
        p._c = c
        p.var = var
        return p

    @classmethod
    def const(cls, c, var: str = "z") -> "Poly":
        return cls({0: c}, var)

    @classmethod
    def mono(cls, e: int, c=1, var: str = "z") -> "Poly":
        return cls({e: c}, var)

    @classmethod
    def gen(cls, var: str = "z") -> "Poly":
        return cls({1: 1}, var)

    # -- inspection ---------------------------------------------------------

    def items(self):
        return sorted(self._c.items())

    def coeff(self, e: int) -> Scalar:
        return self._c.get(e, _ZERO)

    def exponents(self) -> list[int]:
        return sorted(self._c)

    @property
    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    @property
    def degree(self) -> int | None:
        return max(self._c) if self._c else None

    @property
    def low(self) -> int | None:
        return min(self._c) if self._c else None

    @property
    def lead(self) -> Scalar:
        return self._c[max(self._c)] if self._c else _ZERO

    @property
    def is_const(self) -> bool:
        return not self._c or set(self._c) == {0}

    def const_value(self) -> Scalar:
        if not self.is_const:
            raise ValueError("polynomial is not constant")
        return self._c.get(0, _ZERO)

    def is_real(self) -> bool:
        return not any(isinstance(v, GaussianRational) for v in self._c.values())

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.var != self.var:
                raise TagMismatch(f"variable tags differ: {self.var} vs {other.var}")
            return other
        if _is_scalar(other):
            return Poly.const(other, self.var)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.var == other.var and self._c == other._c
        if _is_scalar(other):
            return self.is_const and self.const_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.var, tuple(self.items())))

    def __neg__(self) -> "Poly":
        return Poly._raw({e: -v for e, v in self._c.items()}, self.var)

    def __pos__(self) -> "Poly":
        return self

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for e, v in other._c.items():
            s = c.get(e, _ZERO) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return Poly._raw(c, self.var)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other) -> "Poly":
        if _is_scalar(other):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c: dict[int, Scalar] = {}
        get = c.get
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                c[e] = get(e, _ZERO) + v1 * v2
        return Poly._raw({e: v for e, v in c.items() if v}, self.var)

    def __rmul__(self, other) -> "Poly":
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other) -> "Poly":
        if _is_scalar(other):
            return self.scale(1 / as_scalar(other))
        return NotImplemented

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self._c) == 1 and self.var in LAURENT:
                (e, v), = self._c.items()
                return Poly._raw({e * n: as_scalar(v) ** n}, self.var)
            raise ValueError("negative power of a non-monomial")
        result = Poly.const(1, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        c = as_scalar(c)
        if not c:
            return Poly._raw({}, self.var)
        return Poly._raw({e: v * c for e, v in self._c.items()}, self.var)

    def shift(self, k: int) -> "Poly":
        """Multiply by ``var**k``."""
        return Poly(dict((e + k, v) for e, v in self._c.items()), self.var)

    def monic(self) -> "Poly":
        if not self._c:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        lc = self.lead
        if lc == 1:
            return self
        inv = 1 / lc
        return Poly._raw({e: v * inv for e, v in self._c.items()}, self.var)

    def with_var(self, var: str) -> "Poly":
        return Poly(self._c, var)

    # -- calculus -----------------------------------------------------------

    def dvar(self) -> "Poly":
        """Derivative with respect to the tagged variable itself."""
        return Poly._raw({e - 1: v * e for e, v in self._c.items() if e}, self.var)

    def diff(self, times: int = 1) -> "Poly":
        """Derivative with respect to the physical coordinate ``z``."""
        p = self
        for _ in range(times):
            p = p._diff_once()
        return p

    def _diff_once(self) -> "Poly":
        if self.var in ("z", "x"):
            return self.dvar()
        if self.var == "w":
            return Poly._raw({e - 2: v * Fraction(e, 2) for e, v in self._c.items() if e}, "w")
        return Poly._raw({e: v * I * e for e, v in self._c.items() if e}, "xi")

    # -- division and gcd ---------------------------------------------------

    def _require_polynomial(self):
        if self._c and self.low < 0:
            raise ValueError("operation needs nonnegative exponents")

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        self._require_polynomial()
        other._require_polynomial()
        r = dict(self._c)
        q: dict[int, Scalar] = {}
        db = other.degree
        inv = 1 / other.lead
        items = list(other._c.items())
        while r:
            dr = max(r)
            if dr < db:
                break
            f = r[dr] * inv
            s = dr - db
            q[s] = f
            for e, v in items:
                k = e + s
                t = r.get(k, _ZERO) - f * v
                if t:
                    r[k] = t
                else:
                    r.pop(k, None)
        return Poly._raw(q, self.var), Poly._raw(r, self.var)

    def __floordiv__(self, other) -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other) -> "Poly":
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        """Exact quotient in the (Laurent) ring; raises when a remainder is left."""
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero:
            return self
        a_low, b_low = self.low, other.low
        q, r = self.shift(-a_low).divmod(other.shift(-b_low))
        if r:
            raise InexactDivision("division leaves a remainder")
        shift = a_low - b_low
        if shift < 0 and self.var not in LAURENT:
            raise InexactDivision("quotient would have negative exponents")
        return q.shift(shift)

    def normalized(self) -> tuple["Poly", int]:
        """Split off the monomial factor: ``self = var**k * core`` with ``core(0) != 0``."""
        if self.is_zero:
            return self, 0
        k = self.low
        return self.shift(-k), k

    def __call__(self, x):
        if not self._c:
            return 0
        lo, hi = self.low, self.degree
        acc = 0
        for e in range(hi, lo - 1, -1):
            acc = acc * x + self._c.get(e, 0)
        if lo:
            acc = acc * x ** lo
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        """Substitute ``inner`` for the variable; result carries ``inner``'s tag."""
        self._require_polynomial()
        result = Poly(None, inner.var)
        if not self._c:
            return result
        for e in range(self.degree, -1, -1):
            result = result * inner + self._c.get(e, _ZERO)
        return result

    def map_coeffs(self, f) -> "Poly":
        return Poly({e: f(v) for e, v in self._c.items()}, self.var)

    # -- text and interchange ----------------------------------------------

    def __repr__(self) -> str:
        return f"Poly({self}, var={self.var!r})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e, v in sorted(self._c.items(), reverse=True):
            if e == 0:
                mono = ""
            elif e == 1:
                mono = self.var
            else:
                mono = f"{self.var}^{e}" if e > 0 else f"{self.var}^({e})"
            if isinstance(v, GaussianRational):
                cs = "(" + format_scalar(v) + ")"
                sign = "+"
            else:
                sign = "-" if v < 0 else "+"
                a = abs(v)
                cs = "" if (a == 1 and mono) else (str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}")
            if cs and mono:
                term = f"{cs}*{mono}"
            else:
                term = cs or mono
            parts.append((sign, term))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out

    def to_json(self) -> dict:
        return {"variable": self.var,
                "coefficients": [[e, scalar_to_json(v)] for e, v in self.items()]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Poly":
        var = doc["variable"]
        coeffs: dict[int, Scalar] = {}
        for e, v in doc["coefficients"]:
            if int(e) in coeffs:
                raise ValueError(f"duplicate exponent {e}")
            coeffs[int(e)] = scalar_from_json(v)
        return cls(coeffs, var)


def _primitive_ints(p: Poly) -> list[int] | None:
    """Dense integer coefficients (constant term first) with content removed, or None."""
    coeffs = p._c
    if not all(isinstance(v, (int, Fraction)) for v in coeffs.values()):
        return None
    den = 1
    for v in coeffs.values():
        den = den * v.denominator // gcd(den, v.denominator)
    dense = [0] * (p.degree + 1)
    for e, v in coeffs.items():
        dense[e] = int(v * den)
    return _content_free(dense)


def _content_free(dense: list[int]) -> list[int]:
    g = 0
    for v in dense:
        g = gcd(g, v)
    if g > 1:
        dense = [v // g for v in dense]
    if dense[-1] < 0:
        dense = [-v for v in dense]
    return dense


def _int_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive polynomial remainder sequence over the integers."""
    if len(a) < len(b):
        a, b = b, a
    while len(b) > 1 or (b and b[0]):
        lb, db = b[-1], len(b) - 1
        r = list(a)
        while len(r) - 1 >= db and any(r):
            lr = r[-1]
            s = len(r) - 1 - db
            r = [v * lb for v in r]
            for i, v in enumerate(b):
                r[i + s] -= lr * v
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        if not r:
            return b
        a, b = b, _content_free(r)
    return a


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of two polynomials with nonnegative exponents."""
    if a.var != b.var:
        raise TagMismatch("variable tags differ")
    if a and b and a.low >= 0 and b.low >= 0:
        if a.degree == 0 or b.degree == 0:
            return Poly.const(1, a.var)
        ia, ib = _primitive_ints(a), _primitive_ints(b)
        if ia is not None and ib is not None:
            g = _int_gcd(ia, ib)
            return Poly(dict(enumerate(g)), a.var).monic()
    while b:
        a, b = b, a.divmod(b)[1]
    if a.is_zero:
        return a
    return a.monic()


def poly_xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` and ``g`` monic."""
    var = a.var
    r0, r1 = a, b
    s0, s1 = Poly.const(1, var), Poly(None, var)
    t0, t1 = Poly(None, var), Poly.const(1, var)
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero:
        return r0, s0, t0
    inv = 1 / r0.lead
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: monic square-free pairwise coprime ``(a_i, i)`` with ``p = c*prod a_i**i``.

    Works on the polynomial part; a monomial factor (root at the origin of
    the tagged variable) is reported as the base ``var`` itself.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no square-free decomposition")
    core, k = p.normalized()
    out: list[tuple[Poly, int]] = []
    if k:
        out.append((Poly.gen(p.var), k))
    if core.degree == 0:
        return out
    d = core.dvar()
    a0 = poly_gcd(core, d)
    b = core.exact_div(a0)
    c = d.exact_div(a0)
    dd = c - b.dvar()
    i = 1
    while b.degree and b.degree > 0:
        a = poly_gcd(b, dd)
        if a.degree and a.degree > 0:
            out.append((a.monic(), i))
        b = b.exact_div(a)
        c = dd.exact_div(a)
        dd = c - b.dvar()
        i += 1
    return out


def squarefree_part(p: Poly) -> Poly:
    """Monic product of the distinct irreducible factors (root multiplicities dropped)."""
    result = Poly.const(1, p.var)
    for base, _ in squarefree_decomposition(p):
        result = result * base
    return result
