"""Periodic (cylinder) families in the ring of Laurent polynomials in ``xi = exp(iz)``.

With ``xi`` the identities ``sin z = (xi - 1/xi)/(2i)`` and
``cos z = (xi + 1/xi)/2`` turn trigonometric polynomials into exact
Laurent polynomials over Gaussian rationals.  A phase ``zeta`` enters only
through ``zeta_hat = exp(2 i zeta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

import mpmath

from .diffop import DiffOp, apply, schrodinger
from .exact_core import (I, Inconsistency, Obstruction, Poly, RationalFunction, as_scalar,
                         solve_linear, to_mp)
from .functions import QuasiFactored, polynomial_wronskian, wronskian

XI = Poly.gen("xi")
X = Poly.gen("x")


def _xi(coeffs: dict) -> Poly:
    return Poly(coeffs, "xi")


SIN_NUM = _xi({1: 1, -1: -1})        # 2i sin z
COS_NUM = _xi({1: 1, -1: 1})         # 2 cos z


def sin_power(e) -> QuasiFactored:
    """``sin(z)**e`` as a quasi-factored function."""
    e = Fraction(e)
    return QuasiFactored.build([(SIN_NUM, e)], var="xi", const_powers=[(1 / (2 * I), e)])


def cos_power(e) -> QuasiFactored:
    e = Fraction(e)
    return QuasiFactored.build([(COS_NUM, e)], var="xi", const_powers=[(Fraction(1, 2), e)])


def cos2z() -> Poly:
    return _xi({2: Fraction(1, 2), -2: Fraction(1, 2)})


def sin_squared() -> Poly:
    return _xi({2: Fraction(-1, 4), 0: Fraction(1, 2), -2: Fraction(-1, 4)})


def sine_degree(p: Poly) -> Fraction:
    """Half the Laurent span, i.e. the number of sine factors."""
    return Fraction(p.degree - p.low, 2)


# -- soliton tau-functions ----------------------------------------------------

@dataclass(frozen=True)
class SolitonSeed:
    k: int
    zeta_hat: object = 1

    def poly(self) -> Poly:
        """``2i exp(i zeta) sin(k z + zeta) = zeta_hat xi**k - xi**(-k)``."""
        zh = as_scalar(self.zeta_hat)
        if zh == 0:
            raise ValueError("zeta_hat must be nonzero")
        return _xi({self.k: zh, -self.k: -1})


def _check_soliton(specs: Sequence[SolitonSeed]) -> None:
    ks = [s.k for s in specs]
    if any(k <= 0 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("soliton frequencies must be strictly increasing positive integers")


def soliton_tau(specs: Sequence[SolitonSeed]) -> Poly:
    """``W[sin(k_1 z + zeta_1), ...]`` with leading Laurent coefficient 1."""
    if not specs:
        return Poly.const(1, "xi")
    _check_soliton(specs)
    w = polynomial_wronskian([s.poly() for s in specs])
    if w.is_zero:
        raise ValueError("seeds are linearly dependent")
    return w.scale(1 / w.lead)


def street_bilinear_residual(p: Poly, q: Poly, l=None, m=None, gamma=1) -> Poly:
    """``p''q - 2g p'q' + g**2 pq'' + (l - g m)**2 pq`` (sine degrees by default)."""
    g = as_scalar(gamma)
    l = sine_degree(p) if l is None else as_scalar(l)
    m = sine_degree(q) if m is None else as_scalar(m)
    p1, q1 = p.diff(), q.diff()
    out = p.diff(2) * q - (p1 * q1).scale(2 * g) + (p * q.diff(2)).scale(g * g)
    return out + (p * q).scale((l - g * m) ** 2)


def periodic_ba(specs: Sequence[SolitonSeed], k) -> QuasiFactored:
    """``W[seeds, exp(kz)] / W[seeds]``."""
    _check_soliton(specs)
    seeds = [QuasiFactored.from_poly(s.poly()) for s in specs]
    e = QuasiFactored.exp_linear(k, "xi")
    if not seeds:
        return e
    bottom = wronskian(seeds)
    if bottom.is_zero:
        raise ValueError("seeds are linearly dependent")
    return wronskian(seeds + [e]) / bottom


# -- Poschl-Teller seeds ------------------------------------------------------

def pt_potential(a, b) -> RationalFunction:
    """``a(a-1)/sin(z)**2 + b(b-1)/cos(z)**2`` in ``xi``."""
    a, b = as_scalar(a), as_scalar(b)
    s2 = RationalFunction(SIN_NUM * SIN_NUM).inverse() * (-4)
    c2 = RationalFunction(COS_NUM * COS_NUM).inverse() * 4
    return s2 * (a * (a - 1)) + c2 * (b * (b - 1))


def hyp2f1_terminating(i: int, beta, c, x: Poly) -> Poly:
    """``2F1(-i, beta; c; x)`` for a polynomial argument ``x``."""
    beta, c = as_scalar(beta), as_scalar(c)
    total = Poly.const(1, x.var)
    term = Fraction(1)
    power = Poly.const(1, x.var)
    for j in range(i):
        den = (c + j) * (j + 1)
        if den == 0:
            raise ZeroDivisionError("lower parameter is a nonpositive integer in range")
        term = term * (-i + j) * (beta + j) / den
        power = power * x
        total = total + power.scale(term)
    return total


_PT_TABLE = {
    # type: (beta offset, c, sin exponent, cos exponent, eigenvalue root)
    1: lambda i, a, b: (i + a + b, Fraction(1, 2) + a, a, b, 2 * i + a + b),
    2: lambda i, a, b: (i + 1 - a + b, Fraction(3, 2) - a, 1 - a, b, 2 * i + 1 - a + b),
    3: lambda i, a, b: (i + a + 1 - b, Fraction(1, 2) + a, a, 1 - b, 2 * i + 1 + a - b),
    4: lambda i, a, b: (i + 2 - a - b, Fraction(3, 2) - a, 1 - a, 1 - b, 2 * i + 2 - a - b),
}


def pt_eigenvalue(kind: int, i: int, a, b):
    return _PT_TABLE[kind](i, as_scalar(a), as_scalar(b))[4] ** 2


def pt_generic(a, b) -> bool:
    """``a + b`` and ``a - b`` both non-integer."""
    a, b = Fraction(a), Fraction(b)
    return (a + b).denominator != 1 and (a - b).denominator != 1


@dataclass(frozen=True)
class PTSeed:
    seed: QuasiFactored
    eigenvalue: object
    generic: bool


def pt_seed(kind: int, i: int, a, b) -> PTSeed:
    """Factorizable eigenfunction of ``-d^2 + pt_potential(a, b)`` of the given type."""
    if kind not in _PT_TABLE:
        raise ValueError("type must be 1..4")
    if i < 0:
        raise ValueError("index must be nonnegative")
    a, b = Fraction(a), Fraction(b)
    beta, c, ea, eb, root = _PT_TABLE[kind](i, a, b)
    h = hyp2f1_terminating(i, beta, c, sin_squared())
    f = QuasiFactored.from_poly(h) * sin_power(ea) * cos_power(eb)
    return PTSeed(f, root ** 2, pt_generic(a, b))


def is_pt_eigenfunction(seed: PTSeed, a, b) -> bool:
    op = schrodinger(pt_potential(a, b), "xi") - DiffOp.mul(as_scalar(seed.eigenvalue), "xi")
    return apply(op, seed.seed).is_zero


# -- Jacobi and para-Gegenbauer polynomials -----------------------------------

def jacobi(i: int, alpha, beta, x: Poly = X) -> Poly:
    """Jacobi polynomial ``P_i^(alpha, beta)`` from the terminating hypergeometric sum."""
    alpha, beta = as_scalar(alpha), as_scalar(beta)
    one = Poly.const(1, x.var)
    lo, hi = (x - one).scale(Fraction(1, 2)), (x + one).scale(Fraction(1, 2))
    total = Poly(None, x.var)
    for s in range(i + 1):
        coeff = _gbinom(i + alpha, i - s) * _gbinom(i + beta, s)
        total = total + (lo ** s * hi ** (i - s)).scale(coeff)
    return total


def _gbinom(top, k: int):
    out = Fraction(1)
    for j in range(k):
        out = out * (top - j) / (j + 1)
    return out


def para_gegenbauer(n: int, m: int, zeta, normalization: str = "endpoint") -> Poly:
    """Para-Gegenbauer polynomial ``P_n^(-m,-m)(x, zeta)`` for ``m <= n < 2m``.

    The explicit two-sum expression is evaluated exactly.  With
    ``normalization="endpoint"`` the parameter is rescaled so that
    ``zeta = P(-1)``; ``"formula"`` keeps the raw multiplier of the second sum.
    """
    if not m <= n < 2 * m:
        raise ValueError("need m <= n < 2m")
    f = factorial
    y = (X + 1).scale(Fraction(1, 2))
    a = Fraction((-2) ** n * f(n - m) * f(n), f(2 * n - 2 * m))
    first = Poly(None, "x")
    for k in range(n - m + 1):
        c = Fraction((-1) ** (n - k) * f(2 * n - 2 * m - k), f(k) * f(n - m - k) * f(n - k))
        first = first + (y ** (n - k)).scale(c)
    b = Fraction((-2) ** n * f(2 * n - 2 * m + 1) * f(2 * m - n - 1), f(n - m))
    second = Poly(None, "x")
    for k in range(2 * (n - m) + 1, n + 1):
        c = Fraction((-1) ** (n - k) * f(k - n + m - 1), f(k) * f(k + 2 * m - 2 * n - 1) * f(n - k))
        second = second + (y ** (n - k)).scale(c)
    second = second.scale(b)
    if normalization == "endpoint":
        second = second.scale(1 / second(Fraction(-1)))
    elif normalization != "formula":
        raise ValueError(f"unknown normalization {normalization!r}")
    return first.scale(a) + second.scale(as_scalar(zeta))


def para_gegenbauer_ode(p: Poly, n: int, m: int) -> Poly:
    """``(1 - x**2) p'' + 2(m - 1) x p' + n(n - 2m + 1) p``."""
    return (Poly.const(1, "x") - X * X) * p.diff(2) + (X * p.diff()).scale(2 * (m - 1)) \
        + p.scale(n * (n - 2 * m + 1))


def _in_cos2z(p: Poly) -> Poly:
    return p.compose(cos2z()) if p.degree else Poly.const(p.const_value(), "xi")


def even_street_seed(m: int, n: int, zeta) -> QuasiFactored:
    """``(sin z cos z)**(1/2 - m) * P_n^(-m,-m)(cos 2z, zeta)``."""
    e = Fraction(1, 2) - m
    core = QuasiFactored.from_poly(_in_cos2z(para_gegenbauer(n, m, zeta)))
    return core * sin_power(e) * cos_power(e)


def jacobi_street_seed(l: int, m: int, i: int) -> QuasiFactored:
    """``P_i^(l,m)(cos 2z) sin(z)**(l + 1/2) cos(z)**(m + 1/2)``."""
    core = QuasiFactored.from_poly(_in_cos2z(jacobi(i, l, m)))
    return core * sin_power(Fraction(2 * l + 1, 2)) * cos_power(Fraction(2 * m + 1, 2))


def even_street_sequence(m: int, zetas: Sequence, steps: int | None = None) -> list[QuasiFactored]:
    """``psi_m, psi_{m+1}, ...`` as consecutive Wronskian ratios.

    The first ``m`` seeds are para-Gegenbauer ones (``zetas[i]`` is the
    parameter of seed ``m + i``); later seeds are Jacobi ones ``i = 0, 1, ...``.
    """
    steps = m if steps is None else steps
    seeds = []
    for j in range(steps):
        if j < m:
            seeds.append(even_street_seed(m, m + j, zetas[j]))
        else:
            seeds.append(jacobi_street_seed(m, m, j - m))
    out = []
    prev = QuasiFactored.one("xi")
    for j in range(1, steps + 1):
        w = wronskian(seeds[:j])
        if w.is_zero:
            raise ValueError("seeds are linearly dependent")
        out.append(w / prev)
        prev = w
    return out


def even_street_eigenvalues(m: int, steps: int) -> list[Fraction]:
    vals = []
    for j in range(steps):
        if j < m:
            vals.append(Fraction(2 * (m + j) + 1 - 2 * m) ** 2)
        else:
            vals.append(Fraction(2 * (j - m) + 1 + 2 * m) ** 2)
    return vals


def rational_limit_m1(s1, eps, z):
    """``-psi_1(eps z) / (2 eps**(3/2))`` at ``zeta_1 = -2(1 + eps**2 s1)`` and its limit.

    Returns ``(scaled, limit)`` with ``limit = (z**2 + s1) / z**(1/2)``.
    """
    eps = to_mp(as_scalar(eps)) if isinstance(eps, (int, Fraction)) else mpmath.mpf(eps)
    z, s1 = mpmath.mpmathify(z), to_mp(as_scalar(s1))
    zeta = -2 * (1 + eps ** 2 * s1)
    t = eps * z
    psi = (mpmath.cos(2 * t) + 1 + zeta) / mpmath.sqrt(mpmath.sin(t) * mpmath.cos(t))
    return -psi / (2 * eps ** mpmath.mpf(1.5)), (z ** 2 + s1) / mpmath.sqrt(z)


# -- trigonometric Lambda = 2 -------------------------------------------------

@dataclass(frozen=True)
class TrigFamily:
    """Monic solutions ``particular + sum_j t_j basis_j`` of one step."""

    particular: Poly
    free_exponents: tuple[int, ...]
    basis: tuple[Poly, ...]

    def at(self, values: Sequence = ()) -> Poly:
        out = self.particular
        for v, b in zip(values, self.basis):
            out = out + b.scale(as_scalar(v))
        return out


def trig_lambda2_family(tau_prev: Poly | None, tau_cur: Poly, gamma, degree: int | None = None
                        ) -> TrigFamily | Obstruction:
    """All monic ``t`` of sine degree ``degree`` with ``street_bilinear_residual(tau_cur, t, gamma) = 0``.

    Without ``degree`` it is fixed by ``tau_prev`` as ``2 d_cur / gamma - d_prev``,
    the degree for which ``tau_prev`` solves the same equation.  Coefficients
    at non-pivot exponents (scanning from the top) are the free parameters.
    """
    g = Fraction(gamma)
    d_cur = sine_degree(tau_cur)
    if degree is None:
        if tau_prev is None:
            raise ValueError("degree required for the first step")
        d = 2 * d_cur / g - sine_degree(tau_prev)
        if d.denominator != 1 or d <= 0:
            raise ValueError("degree law gives no admissible degree")
        degree = int(d)
    exps = list(range(degree - 2, -degree - 1, -2))
    cols = [street_bilinear_residual(tau_cur, _xi({e: 1}), d_cur, degree, g) for e in exps]
    fixed = street_bilinear_residual(tau_cur, _xi({degree: 1}), d_cur, degree, g)
    rows = sorted(set().union(*(c.exponents() for c in cols), fixed.exponents()), reverse=True)
    a = [[c.coeff(r) for c in cols] for r in rows]
    b = [-fixed.coeff(r) for r in rows]
    sol = solve_linear(a, b)
    if isinstance(sol, Inconsistency):
        return Obstruction("inconsistent trigonometric step", sol.residual,
                           [rows[k] for k in sol.rows], None)
    part = _xi({degree: 1}) + _xi({e: v for e, v in zip(exps, sol.particular)})
    basis = tuple(_xi({e: v for e, v in zip(exps, sol.basis[f])}) for f in sol.free)
    return TrigFamily(part, tuple(exps[f] for f in sol.free), basis)


def trig_lambda2_step(tau_prev: Poly | None, tau_cur: Poly, gamma, degree: int | None = None,
                      free: Sequence = ()) -> Poly | Obstruction:
    """Next member of a trigonometric Lambda=2 sequence, or the obstruction ending it."""
    fam = trig_lambda2_family(tau_prev, tau_cur, gamma, degree)
    if isinstance(fam, Obstruction):
        return fam
    return fam.at(free)


__all__ = [
    "COS_NUM", "PTSeed", "SIN_NUM", "SolitonSeed", "TrigFamily", "cos_power", "cos2z",
    "even_street_eigenvalues", "even_street_seed", "even_street_sequence", "hyp2f1_terminating",
    "is_pt_eigenfunction", "jacobi", "jacobi_street_seed", "para_gegenbauer", "para_gegenbauer_ode",
    "periodic_ba", "pt_eigenvalue", "pt_generic", "pt_potential", "pt_seed", "rational_limit_m1",
    "sin_power", "sin_squared", "sine_degree", "soliton_tau", "street_bilinear_residual",
    "trig_lambda2_family", "trig_lambda2_step",
]
