"""Darboux transformations of second- and third-order operators.

Second order: ``H = -d^2 + u``.  Third order: ``L = d^3 - u d``.  Every
transform works on quasi-factored eigenfunctions and reports an
:class:`Obstruction` when a primitive would contain a logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .diffop import DiffOp, apply, compose, schrodinger, third_order
from .exact_core import (I, Obstruction, Poly, RationalFunction, as_rational, as_scalar, poly_gcd,
                         rational_antiderivative)
from .functions import QuasiFactored, wronskian

# -- primitives in any tag ----------------------------------------------------


def _to_x(f: RationalFunction) -> RationalFunction:
    """Integrand in an ordinary variable whose primitive is the z-primitive of ``f``."""
    var = f.var
    if var in ("z", "x"):
        return RationalFunction(f.num.with_var("x"), f.den.with_var("x"))
    if var == "w":
        # dz = 2w dw
        g = f * RationalFunction(Poly.mono(1, 2, "w"))
    else:
        # dz = dxi / (i xi)
        g = f * RationalFunction(Poly.const(-I, "xi"), Poly.gen("xi"))
    return RationalFunction(g.num.with_var("x"), g.den.with_var("x"))


def primitive(f: RationalFunction) -> RationalFunction | Obstruction:
    """Rational z-primitive of ``f`` (any tag), or the logarithmic obstruction."""
    var = f.var
    if f.is_zero:
        return f
    r = rational_antiderivative(_to_x(f))
    if isinstance(r, Obstruction):
        return Obstruction(r.reason, r.residue.with_var(var), r.location.with_var(var), r.row)
    out = RationalFunction(r.num.with_var(var), r.den.with_var(var))
    return out


def residue_free(f: RationalFunction) -> bool:
    """True iff every simple-pole part of ``f`` vanishes (``xi = 0`` excluded)."""
    if f.is_zero:
        return True
    r = rational_antiderivative(_to_x(f))
    if not isinstance(r, Obstruction):
        return True
    loc, res = r.location, r.residue
    if f.var == "xi" and loc.coeff(0) == 0:
        loc = loc.exact_div(Poly.gen("x"))
    if not loc.degree:
        return True
    return (res % loc).is_zero


# -- operators ----------------------------------------------------------------

@dataclass(frozen=True)
class SchrodingerOp:
    """``H = -d^2 + u``, optionally remembering ``u = u0 - 2 (log tau)''``."""

    u: RationalFunction
    tau: Poly | None = None
    u0: RationalFunction | None = None

    @classmethod
    def from_tau(cls, tau: Poly, u0=0) -> "SchrodingerOp":
        u0 = as_rational(u0, tau.var)
        u = u0 - RationalFunction(tau.diff(), tau).diff() * 2
        return cls(u, tau, u0)

    @property
    def var(self) -> str:
        return self.u.var

    @property
    def op(self) -> DiffOp:
        return schrodinger(self.u, self.var)

    def check_provenance(self) -> bool:
        if self.tau is None:
            return True
        u0 = self.u0 if self.u0 is not None else as_rational(0, self.var)
        return u0 - RationalFunction(self.tau.diff(), self.tau).diff() * 2 == self.u

    def is_eigenfunction(self, psi: QuasiFactored, lam=0) -> bool:
        shifted = self.op - DiffOp.mul(as_scalar(lam), self.var)
        return apply(shifted, psi).is_zero

    def transform(self, kappa: QuasiFactored) -> "SchrodingerOp":
        """``u - 2 (log kappa)''``."""
        return SchrodingerOp(self.u - kappa.log_derivative().diff() * 2)


@dataclass(frozen=True)
class ThirdOrderOp:
    """``L = d^3 - u d``."""

    u: RationalFunction

    @property
    def var(self) -> str:
        return self.u.var

    @property
    def op(self) -> DiffOp:
        return third_order(self.u, self.var)

    def annihilates(self, f: QuasiFactored) -> bool:
        return apply(self.op, f).is_zero

    def transform(self, kappa: QuasiFactored) -> "ThirdOrderOp":
        """``u - 6 (log kappa)''``."""
        return ThirdOrderOp(self.u - kappa.log_derivative().diff() * 6)


# -- second order -------------------------------------------------------------

def darboux2(psi: QuasiFactored, kappa: QuasiFactored) -> QuasiFactored:
    """``psi' - (kappa'/kappa) psi``."""
    if psi.is_zero:
        return psi
    diff = psi.log_derivative() - kappa.log_derivative()
    if diff.is_zero:
        return QuasiFactored.zero(psi.var)
    return psi.times_rational(diff)


def _monic(f: QuasiFactored) -> QuasiFactored:
    if f.is_zero:
        return f
    return QuasiFactored(f.factors, f.phi, f.k, Fraction(1), (), f.var)


def _normal_primitive(f: RationalFunction, s) -> RationalFunction | Obstruction:
    """Primitive scaled to a monic numerator, shifted so that the numerator
    coefficient at ``var**deg(den)`` equals ``s``."""
    prim = primitive(f)
    if isinstance(prim, Obstruction):
        return prim
    if prim.is_zero:
        raise ValueError("zero integrand")
    num, den = prim.num, prim.den
    num = num.scale(1 / num.lead)
    e = den.degree
    num = num + den.scale(as_scalar(s) - num.coeff(e))
    return RationalFunction(num, den)


def zero_level2(kappa: QuasiFactored, s=0) -> QuasiFactored | Obstruction:
    """``(1/kappa) * integral(kappa**2)`` in monic normal form.

    The integration constant is fixed so that the numerator of the
    primitive has coefficient ``s`` at the power equal to the degree of its
    denominator (for ``kappa = P_k/P_{k-1}`` this is the ``s_k`` of the
    Adler-Moser normal form).
    """
    if kappa.is_zero:
        raise ValueError("zero seed")
    sq = kappa ** 2
    if not sq.is_rational:
        raise ValueError("kappa**2 must be a rational function")
    prim = _normal_primitive(sq.as_rational(), s)
    if isinstance(prim, Obstruction):
        return prim
    return _monic(QuasiFactored.from_rational(prim) / kappa)


def potential_from_eigenfunction(psi: QuasiFactored, lam=0) -> tuple[RationalFunction, bool]:
    """``u = (log psi)'' + ((log psi)')**2 + lam`` and whether ``u`` has no simple poles."""
    v = psi.log_derivative()
    u = v.diff() + v * v + as_scalar(lam)
    return u, residue_free(u)


def crum(seeds: Sequence[QuasiFactored], psi: QuasiFactored, u0=0) -> tuple[QuasiFactored, RationalFunction]:
    """``(W[seeds, psi] / W[seeds], u0 - 2 (log W[seeds])'')``."""
    if not seeds:
        raise ValueError("need at least one seed")
    var = seeds[0].var
    w = wronskian(list(seeds))
    if w.is_zero:
        raise ValueError("seeds are linearly dependent")
    top = wronskian(list(seeds) + [psi])
    u = as_rational(u0, var) - w.log_derivative().diff() * 2
    if top.is_zero:
        return QuasiFactored.zero(var), u
    return top / w, u


def _charges(f: QuasiFactored) -> list[tuple[Poly, Fraction]]:
    """Bases with charges; in the ``w`` tag the base ``w`` carries half its exponent."""
    out = []
    for b, e in f.factors:
        if f.var == "w" and b == Poly.gen("w"):
            out.append((b, e / 2))
        else:
            out.append((b, e))
    return out


def charge_map_holds(before: QuasiFactored, after: QuasiFactored, gamma=1) -> bool:
    """Every charge of ``after`` is ``-g Q`` or ``g (Q + 1)`` of the charge ``Q`` at that root."""
    g = Fraction(gamma)
    old = _charges(before)
    for b, q_new in _charges(after):
        rest = b
        for a, q in old:
            c = poly_gcd(a, rest)
            if c.degree:
                if q_new not in (-g * q, g * (q + 1)):
                    return False
                rest = rest.exact_div(c)
        if rest.degree and q_new != g:
            return False
    return True


def kwcc(psi: QuasiFactored, gamma, s=0) -> QuasiFactored | Obstruction:
    """``(zero_level2(psi, s)) ** gamma`` with the charge map checked."""
    g = Fraction(gamma)
    if g not in (Fraction(1, 2), Fraction(1), Fraction(2)):
        raise ValueError("gamma must be 1/2, 1 or 2")
    hat = zero_level2(psi, s)
    if isinstance(hat, Obstruction):
        return hat
    out = hat ** g
    if not charge_map_holds(psi, out, g):
        raise ArithmeticError("output charges do not follow the KWCC charge map")
    return out


# -- third order --------------------------------------------------------------

@dataclass(frozen=True)
class Factorization3:
    b: DiffOp
    a: DiffOp
    u: RationalFunction


def factorize3(kappa: QuasiFactored) -> Factorization3:
    """``d^3 - u d = B A`` with ``A = d - v``, ``v = kappa'/kappa``."""
    v = kappa.log_derivative()
    if v.is_zero:
        raise ValueError("kappa must be non-constant")
    var = v.var
    v1, v2 = v.diff(), v.diff(2)
    a = DiffOp({1: 1, 0: -v}, var)
    b = DiffOp({2: 1, 1: v, 0: -v1 - v2 / v}, var)
    u = v1 * 3 + v * v + v2 / v
    if compose(b, a) != third_order(u, var):
        raise ArithmeticError("factorization does not reproduce the operator")
    return Factorization3(b, a, u)


def darboux3(kappa: QuasiFactored, a=0, b=0) -> QuasiFactored | Obstruction:
    """``integral(kappa**3/kappa'**2) - (1/kappa) integral(kappa**4/kappa'**2)``, made monic.

    ``a`` and ``b`` are the raw integration constants of the two primitives.
    For ``kappa = z`` the result is ``(z**5 + 20 a z - 20 b)/z``, so
    ``a = s_2/20`` and ``b = r_1/5`` in the chain normal form.
    """
    if not kappa.is_rational:
        raise ValueError("kappa must be a rational function")
    k = kappa.as_rational()
    dk = k.diff()
    if dk.is_zero:
        raise ValueError("kappa must be non-constant")
    inv = (dk * dk).inverse()
    f3 = primitive(k ** 3 * inv)
    if isinstance(f3, Obstruction):
        return f3
    f4 = primitive(k ** 4 * inv)
    if isinstance(f4, Obstruction):
        return f4
    hat = f3 + as_scalar(a) - (f4 + as_scalar(b)) / k
    if hat.is_zero:
        return QuasiFactored.zero(k.var)
    return _monic(QuasiFactored.from_rational(hat))


@dataclass(frozen=True)
class AbelTriple:
    q_minus: Poly
    q: Poly
    q_plus: Poly
    p_minus: Poly
    p: Poly

    def defect(self) -> tuple[Poly, object]:
        """``(p' p_- - p p_-' - c q**4, c)`` with ``c`` matched at the top degree."""
        lhs = self.p.diff() * self.p_minus - self.p * self.p_minus.diff()
        q4 = self.q ** 4
        c = lhs.coeff(q4.degree) / q4.lead if lhs else 0
        return lhs - q4.scale(c), c


def abel_triple(kappa: QuasiFactored, kappa_hat: QuasiFactored) -> AbelTriple:
    """Read ``kappa = q/q_-``, ``kappa_hat = q_+/q`` and form ``p, p_-``."""
    k, kh = kappa.as_rational(), kappa_hat.as_rational()
    q, q_minus = k.num, k.den
    if kh.den.monic() != q.monic():
        raise ValueError("denominator of kappa_hat must be the numerator of kappa")
    q_plus = kh.num.scale(q.lead / kh.den.lead)
    p = q_plus.diff() * q - q_plus * q.diff()
    p_minus = q.diff() * q_minus - q * q_minus.diff()
    return AbelTriple(q_minus, q, q_plus, p_minus, p)


__all__ = [
    "AbelTriple", "Factorization3", "SchrodingerOp", "ThirdOrderOp", "abel_triple",
    "charge_map_holds", "crum", "darboux2", "darboux3", "factorize3", "kwcc",
    "potential_from_eigenfunction", "primitive", "residue_free", "zero_level2",
]
