"""Ordinary differential operators with rational-function coefficients."""

from __future__ import annotations

from math import comb
from typing import Mapping, Sequence

from .exact_core import Poly, RationalFunction, as_rational, fraction_free_det
from .functions import QuasiFactored, bell_matrix, bell_numerators


class DiffOp:
    """``sum_k c_k(z) d^k`` where ``d`` is the derivative in ``z`` (tag-aware)."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Mapping[int, object] | None = None, var: str = "z"):
        c: dict[int, RationalFunction] = {}
        for order, v in (coeffs or {}).items():
            if order < 0:
                raise ValueError("negative order")
            r = as_rational(v, var)
            if r.var != var:
                raise ValueError("coefficient tag mismatch")
            if r:
                c[int(order)] = r
        self.coeffs = c
        self.var = var

    @classmethod
    def d(cls, var: str = "z") -> "DiffOp":
        return cls({1: 1}, var)

    @classmethod
    def identity(cls, var: str = "z") -> "DiffOp":
        return cls({0: 1}, var)

    @classmethod
    def mul(cls, f, var: str = "z") -> "DiffOp":
        return cls({0: f}, var)

    @property
    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> RationalFunction:
        return self.coeffs.get(k, RationalFunction(Poly(None, self.var)))

    def monic(self) -> "DiffOp":
        lc = self.coeffs[self.order]
        inv = lc.inverse()
        return DiffOp({k: v * inv for k, v in self.coeffs.items()}, self.var)

    def _coerce(self, other) -> "DiffOp":
        if isinstance(other, DiffOp):
            if other.var != self.var:
                raise ValueError("tag mismatch")
            return other
        return DiffOp.mul(other, self.var)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.var == other.var and self.coeffs == other.coeffs

    def __add__(self, other) -> "DiffOp":
        other = self._coerce(other)
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c[k] + v if k in c else v
        return DiffOp(c, self.var)

    __radd__ = __add__

    def __neg__(self) -> "DiffOp":
        return DiffOp({k: -v for k, v in self.coeffs.items()}, self.var)

    def __sub__(self, other) -> "DiffOp":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "DiffOp":
        return self._coerce(other) - self

    def __mul__(self, other) -> "DiffOp":
        return compose(self, self._coerce(other))

    def __rmul__(self, other) -> "DiffOp":
        return compose(self._coerce(other), self)

    def __pow__(self, n: int) -> "DiffOp":
        out = DiffOp.identity(self.var)
        for _ in range(n):
            out = compose(out, self)
        return out

    def __call__(self, f):
        if isinstance(f, QuasiFactored):
            return apply(self, f)
        return apply_rational(self, as_rational(f, self.var))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "DiffOp(0)"
        terms = []
        for k in sorted(self.coeffs, reverse=True):
            d = "" if k == 0 else ("d" if k == 1 else f"d^{k}")
            c = self.coeffs[k]
            if c == 1 and d:
                terms.append(d)
            else:
                terms.append(f"[{c}]{('*' + d) if d else ''}")
        return "DiffOp(" + " + ".join(terms) + ")"

    def to_json(self) -> list:
        return [[k, v.num.to_json(), v.den.to_json()] for k, v in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, doc: Sequence) -> "DiffOp":
        coeffs = {}
        var = "z"
        for order, num, den in doc:
            r = RationalFunction(Poly.from_json(num), Poly.from_json(den))
            coeffs[int(order)] = r
            var = r.var
        return cls(coeffs, var)


def compose(f: DiffOp, g: DiffOp) -> DiffOp:
    """Operator product ``f o g`` by the Leibniz rule."""
    if f.var != g.var:
        raise ValueError("tag mismatch")
    top = f.order
    out: dict[int, RationalFunction] = {}
    for j, b in g.coeffs.items():
        derivs = [b]
        for _ in range(top):
            derivs.append(derivs[-1].diff())
        for i, a in f.coeffs.items():
            for m in range(i + 1):
                bm = derivs[m]
                if not bm:
                    continue
                term = a * bm * comb(i, m)
                k = i - m + j
                out[k] = out[k] + term if k in out else term
    return DiffOp(out, f.var)


def apply_rational(op: DiffOp, r: RationalFunction) -> RationalFunction:
    acc = RationalFunction(Poly(None, op.var))
    deriv = r
    for k in range(op.order + 1):
        if k:
            deriv = deriv.diff()
        c = op.coeffs.get(k)
        if c is not None:
            acc = acc + c * deriv
    return acc


def apply(op: DiffOp, f: QuasiFactored) -> QuasiFactored:
    """``op[f]`` as ``f * sum_k c_k f^(k)/f``; prefactors of ``f`` pass through."""
    if f.var != op.var:
        raise ValueError("tag mismatch")
    if f.is_zero or op.is_zero:
        return QuasiFactored.zero(op.var)
    ns, d = bell_numerators(f, op.order + 1)
    acc = RationalFunction(Poly(None, op.var))
    for k, c in op.coeffs.items():
        acc = acc + c * RationalFunction(ns[k], d ** k)
    if acc.is_zero:
        return QuasiFactored.zero(op.var)
    return f * QuasiFactored.from_rational(acc)


def intertwine_check(l1: DiffOp, t: DiffOp, l0: DiffOp) -> bool:
    """True iff ``l1 o t == t o l0`` exactly."""
    return (compose(l1, t) - compose(t, l0)).is_zero


def wronskian_intertwiner(seeds: Sequence[QuasiFactored]) -> DiffOp:
    """Monic operator ``T[psi] = W[seeds, psi] / W[seeds]`` of order ``len(seeds)``."""
    n = len(seeds)
    if n == 0:
        raise ValueError("need at least one seed")
    var = seeds[0].var
    matrix, _ = bell_matrix(seeds, n + 1)
    minors = []
    for k in range(n + 1):
        rows = [matrix[r] for r in range(n + 1) if r != k]
        minors.append(fraction_free_det(rows))
    top = minors[n]
    if top.is_zero:
        raise ValueError("seeds are linearly dependent")
    coeffs = {}
    for k in range(n + 1):
        if minors[k]:
            sign = 1 if (k + n) % 2 == 0 else -1
            coeffs[k] = RationalFunction(minors[k].scale(sign), top)
    return DiffOp(coeffs, var)


def schrodinger(u, var: str = "z") -> DiffOp:
    """``-d^2 + u``."""
    return DiffOp({2: -1, 0: u}, var)


def third_order(u, var: str = "z") -> DiffOp:
    """``d^3 - u d``."""
    return DiffOp({3: 1, 1: -as_rational(u, var)}, var)


__all__ = ["DiffOp", "apply", "apply_rational", "compose", "intertwine_check", "schrodinger",
           "third_order", "wronskian_intertwiner"]
