"""Rational primitives and first-order Wronskian-type recurrences.

Both report an :class:`Obstruction` instead of producing a logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import Inconsistency, solve_linear
from .poly import Poly, poly_gcd, poly_xgcd
from .ratfunc import RationalFunction
from .scalar import I, Scalar, as_scalar


@dataclass(frozen=True)
class Obstruction:
    """A step that would need a logarithm (or has no polynomial solution).

    ``residue`` is the offending value: for a primitive, the residue
    polynomial ``B / D'`` reduced modulo ``location``; for a recurrence
    step, the first nonzero coefficient of the leftover equation.
    """

    reason: str
    residue: object
    location: object = None
    row: int | None = None

    def __bool__(self) -> bool:
        return False


def _integrate_poly(p: Poly) -> Poly:
    if any(e == -1 for e in p.exponents()):
        raise ValueError("monomial z^-1 has no polynomial primitive")
    return Poly({e + 1: v / (e + 1) for e, v in p.items()}, p.var)


def rational_antiderivative(f: RationalFunction, den_factors=None) -> RationalFunction | Obstruction:
    """Rational primitive of ``f`` (constant term zero) or an obstruction.

    Horowitz-Ostrogradsky ansatz: with ``D- = gcd(D, D')`` and
    ``D* = D / D-``, write ``N/D = (A/D-)' + B/D*`` and solve the linear
    system for ``A`` and ``B``; a nonzero ``B`` means a logarithmic term.

    ``den_factors`` may give the denominator as ``[(base, multiplicity)]``
    with square-free, pairwise coprime bases; this skips the gcd.
    """
    if f.var not in ("z", "x"):
        raise ValueError("rational_antiderivative works in a polynomial variable")
    var = f.var
    num, den = f.num, f.den
    q, r = num.divmod(den)
    poly_part = _integrate_poly(q)
    if r.is_zero:
        return RationalFunction.from_poly(poly_part)
    if den_factors:
        dm, ds = Poly.const(1, var), Poly.const(1, var)
        for base, mult in den_factors:
            dm = dm * base ** (mult - 1)
            ds = ds * base
        if (dm * ds).monic() != den:
            raise ValueError("den_factors do not multiply to the denominator")
    else:
        dm = poly_gcd(den, den.dvar())
        ds = den.exact_div(dm)
    h = (ds * dm.dvar()).exact_div(dm)
    na, nb = dm.degree, ds.degree
    size = na + nb
    columns: list[Poly] = []
    for i in range(na):
        zi = Poly.mono(i, 1, var)
        columns.append(zi.dvar() * ds - zi * h)
    for j in range(nb):
        columns.append(Poly.mono(j, 1, var) * dm)
    matrix = [[col.coeff(row) for col in columns] for row in range(size)]
    rhs = [r.coeff(row) for row in range(size)]
    sol = solve_linear(matrix, rhs)
    if isinstance(sol, Inconsistency):
        raise ArithmeticError("Horowitz-Ostrogradsky system is singular")
    x = sol.particular
    a = Poly(dict(enumerate(x[:na])), var)
    b = Poly(dict(enumerate(x[na:])), var)
    if b:
        # residue at the roots of D*: B / D*' modulo D*
        _, s, _ = poly_xgcd(ds.dvar(), ds)
        residue = (b * s).divmod(ds)[1]
        return Obstruction("logarithmic term", residue, ds)
    return RationalFunction(a, dm) + RationalFunction.from_poly(poly_part)


def _raw_rhs(rhs: Poly) -> Poly:
    """Rewrite ``f'g - fg' = R`` (z-derivatives) as ``f_v g - f g_v = R~``."""
    if rhs.var in ("z", "x"):
        return rhs
    if rhs.var == "w":
        return rhs.shift(1).scale(2)
    return rhs.shift(-1).scale(-I)


def solve_first_order(known: Poly, rhs: Poly, top: int | None = None, low: int = 0,
                      free: Scalar = 0) -> Poly | Obstruction:
    """Solve ``f' g - f g' = rhs`` for a (Laurent) polynomial ``f``.

    ``g = known``; derivatives are taken with respect to ``z`` according to
    the tag.  The unknown has exponents in ``[low, top]`` (``top`` defaults to
    the value forced by the leading terms).  The coefficient of ``f`` at the
    exponent ``deg g`` is not determined by the equation and is set to
    ``free``; the system is triangular, so it is solved by back-substitution
    from the top exponent.  Any equation left unsatisfied yields an
    obstruction carrying the first nonzero leftover coefficient.
    """
    g = known
    if g.var != rhs.var:
        raise ValueError("tag mismatch")
    var = g.var
    target = _raw_rhs(rhs)
    gh = g.degree
    bg = g.lead
    if top is None:
        if target.is_zero:
            top = gh
        else:
            top = target.degree - gh + 1
    g_items = g.items()
    a: dict[int, Scalar] = {}
    for j in range(top, low - 1, -1):
        if j == gh:
            v = as_scalar(free)
            if v:
                a[j] = v
            continue
        t = j + gh - 1
        # contributions of already-fixed coefficients a_k (k > j) to row t
        acc = Fraction(0)
        for l, bl in g_items:
            k = t + 1 - l
            if k <= j:
                continue
            ak = a.get(k)
            if ak is not None:
                acc = acc + (k - l) * ak * bl
        val = (target.coeff(t) - acc) / ((j - gh) * bg)
        if val:
            a[j] = val
    f = Poly(a, var)
    residual = f.dvar() * g - f * g.dvar() - target
    if residual:
        e = residual.degree
        return Obstruction("inconsistent first-order step", residual.coeff(e), residual, e)
    return f
