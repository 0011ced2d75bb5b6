"""Quasi-factored functions and their exact Wronskians.

A :class:`QuasiFactored` value is

    const * prod(c_j ** g_j) * prod(base_i ** e_i) * exp(phi) * exp(k z)

with monic, square-free, pairwise coprime bases and rational exponents.
Bases sharing an exponent are multiplied together (the bare generator ``z``
or ``w`` stays on its own), which makes the form unique and equality exact.
For the ``xi`` tag (``xi = exp(iz)``) a monomial ``xi**m`` is a plane wave
and is folded into ``k`` as ``i*m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .exact_core import (I, Poly, RationalFunction, Scalar, as_scalar, fraction_free_det,
                         poly_gcd, scalar_from_json, scalar_to_json, squarefree_decomposition, to_mp)

Factor = tuple[Poly, Fraction]


def _key(p: Poly):
    return (p.degree, [(e, str(v)) for e, v in p.items()])


def _merge(pairs: Iterable[Factor]) -> list[Factor]:
    """Refine ``(base, exponent)`` pairs into a coprime basis, summing exponents."""
    result: list[list] = []
    work = [(b, Fraction(e)) for b, e in pairs]
    while work:
        b, e = work.pop()
        for idx, (a, ea) in enumerate(result):
            g = poly_gcd(a, b)
            if g.degree:
                del result[idx]
                a1, b1 = a.exact_div(g), b.exact_div(g)
                if a1.degree:
                    work.append((a1.monic(), ea))
                if b1.degree:
                    work.append((b1.monic(), e))
                work.append((g, ea + e))
                break
        else:
            result.append([b, e])
    grouped: dict[Fraction, Poly] = {}
    out = []
    for b, e in result:
        if e == 0:
            continue
        if b.degree == 1 and b.coeff(0) == 0:
            out.append((b, e))
        else:
            grouped[e] = grouped[e] * b if e in grouped else b
    out.extend((b, e) for e, b in grouped.items())
    out.sort(key=lambda f: _key(f[0]))
    return out


def _merge_const_powers(items: Iterable[tuple[Scalar, Fraction]]) -> tuple[Scalar, tuple]:
    """Fold constant powers; integer totals become part of the plain constant."""
    acc: dict = {}
    for c, g in items:
        acc[c] = acc.get(c, Fraction(0)) + g
    const: Scalar = Fraction(1)
    rest = []
    for c, g in acc.items():
        if g.denominator == 1:
            const = const * as_scalar(c) ** int(g)
        elif g:
            rest.append((c, g))
    rest.sort(key=lambda t: str(t[0]))
    return const, tuple(rest)


@dataclass(frozen=True, eq=False)
class QuasiFactored:
    factors: tuple[Factor, ...]
    phi: Poly
    k: Scalar
    const: Scalar
    const_powers: tuple = ()
    var: str = "z"

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, factors: Iterable[tuple[Poly, object]] = (), phi: Poly | None = None, k=0,
              const=1, var: str | None = None, const_powers: Iterable = ()) -> "QuasiFactored":
        """Normalize arbitrary ``(base, exponent)`` pairs into canonical form."""
        factors = [(b, Fraction(e)) for b, e in factors]
        if var is None:
            var = factors[0][0].var if factors else (phi.var if phi is not None else "z")
        phi = phi if phi is not None else Poly(None, var)
        k = as_scalar(k)
        const = as_scalar(const)
        if const == 0:
            return cls.zero(var)
        pieces: list[Factor] = []
        cpows = list(const_powers)
        for base, e in factors:
            if base.var != var:
                raise ValueError("factor tag mismatch")
            if e == 0:
                continue
            if base.is_zero:
                if e > 0:
                    return cls.zero(var)
                raise ZeroDivisionError("negative power of the zero polynomial")
            core, m = base.normalized()
            lc = core.lead
            core = core.monic()
            if lc != 1:
                cpows.append((lc, e))
            if m:
                if var == "xi":
                    k = k + I * m * e
                else:
                    pieces.append((Poly.gen(var), m * e))
            if core.degree:
                for sq, mult in squarefree_decomposition(core):
                    pieces.append((sq, mult * e))
        c2, rest = _merge_const_powers(cpows)
        const = const * c2
        return cls(tuple(_merge(pieces)), phi, k, const, rest, var)

    @classmethod
    def zero(cls, var: str = "z") -> "QuasiFactored":
        return cls((), Poly(None, var), Fraction(0), Fraction(0), (), var)

    @classmethod
    def one(cls, var: str = "z") -> "QuasiFactored":
        return cls((), Poly(None, var), Fraction(0), Fraction(1), (), var)

    @classmethod
    def from_poly(cls, p: Poly) -> "QuasiFactored":
        if p.is_zero:
            return cls.zero(p.var)
        return cls.build([(p, 1)], var=p.var)

    @classmethod
    def from_rational(cls, r: RationalFunction) -> "QuasiFactored":
        if r.is_zero:
            return cls.zero(r.var)
        return cls.build([(r.num, 1), (r.den, -1)], var=r.var)

    @classmethod
    def exp_linear(cls, k, var: str = "z") -> "QuasiFactored":
        return cls.build(k=k, var=var)

    # -- inspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.const == 0

    def __bool__(self) -> bool:
        return not self.is_zero

    def exponents(self) -> dict:
        return {b: e for b, e in self.factors}

    def exponent_of(self, base: Poly) -> Fraction:
        """Exponent carried by every root of ``base`` (0 if none of them occur)."""
        base = base.monic()
        found = set()
        for b, e in self.factors:
            g = poly_gcd(b, base)
            if g.degree:
                found.add(e)
                base = base.exact_div(g)
        if len(found) > 1:
            raise ValueError("roots of base carry different exponents")
        if found and base.degree:
            raise ValueError("only some roots of base occur")
        return found.pop() if found else Fraction(0)

    @property
    def is_rational(self) -> bool:
        return (not self.phi and not self.k and not self.const_powers
                and all(e.denominator == 1 for _, e in self.factors))

    def as_rational(self) -> RationalFunction:
        if not self.is_rational:
            raise ValueError("not a rational function")
        num = Poly.const(self.const, self.var)
        den = Poly.const(1, self.var)
        for b, e in self.factors:
            if e > 0:
                num = num * b ** int(e)
            else:
                den = den * b ** int(-e)
        return RationalFunction(num, den)

    def positive_part(self) -> Poly:
        """Product of the bases with positive (integer) exponents."""
        out = Poly.const(1, self.var)
        for b, e in self.factors:
            if e > 0:
                if e.denominator != 1:
                    raise ValueError("fractional exponent in positive part")
                out = out * b ** int(e)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiFactored):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero and self.var == other.var
        return (self.var == other.var and self.factors == other.factors and self.phi == other.phi
                and self.k == other.k and self.const == other.const
                and self.const_powers == other.const_powers)

    def same_up_to_constant(self, other: "QuasiFactored") -> bool:
        return (self.factors == other.factors and self.phi == other.phi and self.k == other.k)

    def __hash__(self) -> int:
        return hash((self.var, self.factors, self.phi, self.k, self.const))

    # -- algebra ------------------------------------------------------------

    def __mul__(self, other) -> "QuasiFactored":
        if not isinstance(other, QuasiFactored):
            c = as_scalar(other)
            if self.is_zero or c == 0:
                return QuasiFactored.zero(self.var)
            return QuasiFactored(self.factors, self.phi, self.k, self.const * c,
                                 self.const_powers, self.var)
        if other.var != self.var:
            raise ValueError("tag mismatch")
        if self.is_zero or other.is_zero:
            return QuasiFactored.zero(self.var)
        c2, rest = _merge_const_powers(list(self.const_powers) + list(other.const_powers))
        return QuasiFactored(tuple(_merge(list(self.factors) + list(other.factors))),
                             self.phi + other.phi, self.k + other.k,
                             self.const * other.const * c2, rest, self.var)

    __rmul__ = __mul__

    def __pow__(self, g) -> "QuasiFactored":
        g = Fraction(g)
        if self.is_zero:
            if g > 0:
                return self
            raise ZeroDivisionError("power of zero")
        cp = [(c, e * g) for c, e in self.const_powers]
        if g.denominator == 1:
            const = self.const ** int(g)
        else:
            const = Fraction(1)
            if self.const != 1:
                cp.append((self.const, g))
        c2, rest = _merge_const_powers(cp)
        factors = tuple((b, e * g) for b, e in self.factors if e * g != 0)
        return QuasiFactored(factors, self.phi.scale(g), self.k * g, const * c2, rest, self.var)

    def inverse(self) -> "QuasiFactored":
        return self ** -1

    def __truediv__(self, other) -> "QuasiFactored":
        if isinstance(other, QuasiFactored):
            return self * other.inverse()
        return self * (1 / as_scalar(other))

    def __neg__(self) -> "QuasiFactored":
        return self * -1

    # -- calculus -----------------------------------------------------------

    def log_derivative(self) -> RationalFunction:
        """``sum e_i base_i'/base_i + phi' + k`` as one reduced rational function."""
        if self.is_zero:
            raise ZeroDivisionError("log-derivative of the zero function")
        var = self.var
        den = Poly.const(1, var)
        for b, _ in self.factors:
            den = den * b
        num = (self.phi.diff() + self.k) * den
        for i, (b, e) in enumerate(self.factors):
            rest = Poly.const(e, var)
            for j, (c, _) in enumerate(self.factors):
                if j != i:
                    rest = rest * c
            num = num + b.diff() * rest
        return RationalFunction(num, den)

    def times_rational(self, r: RationalFunction) -> "QuasiFactored":
        return self * QuasiFactored.from_rational(r)

    def derivative(self) -> "QuasiFactored":
        if self.is_zero:
            return self
        return self.times_rational(self.log_derivative())

    # -- numerics -----------------------------------------------------------

    def _coordinate(self, z):
        if self.var == "w":
            return mpmath.sqrt(z)
        if self.var == "xi":
            return mpmath.exp(1j * z)
        return z

    def evaluate(self, z):
        """Numeric value (principal branches for fractional powers)."""
        if self.is_zero:
            return mpmath.mpf(0)
        v = self._coordinate(z)
        val = to_mp(self.const) * mpmath.exp(self.phi(v) + to_mp(self.k) * z) if self.phi else \
            to_mp(self.const) * mpmath.exp(to_mp(self.k) * z)
        for c, g in self.const_powers:
            val *= mpmath.power(to_mp(c), to_mp(g))
        for b, e in self.factors:
            val *= mpmath.power(_eval_poly(b, v), to_mp(e))
        return val

    # -- interchange --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "variable": self.var,
            "const": scalar_to_json(self.const),
            "const_powers": [[scalar_to_json(c), scalar_to_json(g)] for c, g in self.const_powers],
            "factors": [{"base": b.to_json(), "exponent": scalar_to_json(e)} for b, e in self.factors],
            "phi": self.phi.to_json(),
            "k": scalar_to_json(self.k),
        }

    @classmethod
    def from_json(cls, doc) -> "QuasiFactored":
        var = doc["variable"]
        const = scalar_from_json(doc.get("const", "1"))
        factors = [(Poly.from_json(f["base"]), Fraction(scalar_from_json(f["exponent"])))
                   for f in doc.get("factors", [])]
        cp = [(scalar_from_json(c), Fraction(scalar_from_json(g))) for c, g in doc.get("const_powers", [])]
        phi = Poly.from_json(doc["phi"]) if "phi" in doc else Poly(None, var)
        if const == 0:
            return cls.zero(var)
        return cls.build(factors, phi, scalar_from_json(doc.get("k", "0")), const, var, cp)

    def __repr__(self) -> str:
        if self.is_zero:
            return "QuasiFactored(0)"
        parts = [] if self.const == 1 else [f"{self.const}"]
        parts += [f"({c})^({g})" for c, g in self.const_powers]
        for b, e in self.factors:
            parts.append(f"({b})" if e == 1 else f"({b})^({e})")
        if self.phi:
            parts.append(f"exp({self.phi})")
        if self.k:
            parts.append(f"exp(({self.k})*z)")
        return "QuasiFactored(" + (" * ".join(parts) or "1") + f", var={self.var!r})"


def _eval_poly(p: Poly, v):
    acc = 0
    for e, c in p.items():
        acc += to_mp(c) * v ** e
    return acc


def log_derivative(f: QuasiFactored) -> RationalFunction:
    return f.log_derivative()


def bell_numerators(f: QuasiFactored, rows: int) -> tuple[list[Poly], Poly]:
    """Polynomials ``N_k`` and ``D`` with ``f^(k)/f = N_k / D**k`` for ``k < rows``."""
    lg = f.log_derivative()
    a, d = lg.num, lg.den
    dd = d.diff()
    out = [Poly.const(1, f.var)]
    for k in range(rows - 1):
        nk = out[-1]
        out.append(nk.diff() * d - nk * dd.scale(k) + a * nk)
    return out, d


def bell_matrix(fs: Sequence[QuasiFactored], rows: int) -> tuple[list[list[Poly]], list[Poly]]:
    """Column-scaled Bell matrix ``M[k][j] = N_kj * D_j**(rows-1-k)``.

    ``det`` of any ``n`` rows of ``M`` equals the corresponding determinant of
    ``f_j^(k)/f_j`` times ``prod D_j**(rows-1)``.
    """
    cols, dens = [], []
    for f in fs:
        ns, d = bell_numerators(f, rows)
        cols.append([ns[k] * d ** (rows - 1 - k) for k in range(rows)])
        dens.append(d)
    matrix = [[cols[j][k] for j in range(len(fs))] for k in range(rows)]
    return matrix, dens


def wronskian(fs: Sequence[QuasiFactored]) -> QuasiFactored:
    """Exact Wronskian ``(prod f_j) * det(f_j^(k)/f_j)`` in quasi-factored form.

    Linearly dependent inputs give the zero function.
    """
    if not fs:
        raise ValueError("wronskian of an empty list")
    var = fs[0].var
    if any(f.var != var for f in fs):
        raise ValueError("tag mismatch")
    if any(f.is_zero for f in fs):
        return QuasiFactored.zero(var)
    n = len(fs)
    if n == 1:
        return fs[0]
    matrix, dens = bell_matrix(fs, n)
    det = fraction_free_det(matrix)
    if det.is_zero:
        return QuasiFactored.zero(var)
    result = QuasiFactored.from_poly(det)
    for f in fs:
        result = result * f
    scale = [(d, -(n - 1)) for d in dens if d.degree]
    if scale:
        result = result * QuasiFactored.build(scale, var=var)
    return result


def polynomial_wronskian(polys: Sequence[Poly]) -> Poly:
    """``det(p_j^(k))`` by direct differentiation (plain polynomial inputs)."""
    n = len(polys)
    rows = [list(polys)]
    for _ in range(n - 1):
        rows.append([p.diff() for p in rows[-1]])
    return fraction_free_det(rows)


def nonuniform_wronskian(phi: Poly, seeds: Sequence[Poly]) -> QuasiFactored:
    """``W[R_1 e^phi, ..., R_n e^phi] / W[R_1 e^phi, ..., R_{n-1} e^phi]``.

    The common factor is pulled out with ``W[f g_1, ..., f g_n] = f**n W[g]``,
    so the ratio equals ``e^phi * W[R_1..R_n] / W[R_1..R_{n-1}]``.
    """
    if not seeds:
        raise ValueError("need at least one seed")
    var = phi.var
    gs = [QuasiFactored.from_poly(r) for r in seeds]
    top = wronskian(gs)
    if top.is_zero:
        return top
    bottom = wronskian(gs[:-1]) if len(gs) > 1 else QuasiFactored.one(var)
    return top / bottom * QuasiFactored.build(phi=phi, var=var)
