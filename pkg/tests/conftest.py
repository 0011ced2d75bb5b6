import random
from fractions import Fraction

import sympy as sp
from hypothesis import settings, strategies as st

from vortexlab.exact_core import GaussianRational, Poly, gaussian

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

Z = sp.Symbol("z")
I = sp.I

small_fracs = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 7))
nonzero_fracs = small_fracs.filter(bool)
gaussians = st.builds(gaussian, small_fracs, small_fracs)


def polys(var="z", max_deg=4, scalars=small_fracs, laurent=False):
    low = -max_deg if laurent else 0
    return st.dictionaries(st.integers(low, max_deg), scalars, max_size=max_deg + 2).map(
        lambda d: Poly(d, var))


def rand_frac(rng: random.Random, bound=20) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 9))


def rand_nonzero(rng: random.Random, bound=20) -> Fraction:
    while True:
        v = rand_frac(rng, bound)
        if v:
            return v


def sym_scalar(c):
    if isinstance(c, GaussianRational):
        return sp.Rational(c.re.numerator, c.re.denominator) + I * sp.Rational(c.im.numerator, c.im.denominator)
    c = Fraction(c)
    return sp.Rational(c.numerator, c.denominator)


def to_sym(p: Poly, x=Z):
    """Poly as a sympy expression in ``x`` (the tag variable itself)."""
    return sp.Add(*[sym_scalar(c) * x ** e for e, c in p.items()])


def from_sym(expr, var="z", x=Z) -> Poly:
    expr = sp.expand(expr)
    out = {}
    for (e,), c in sp.Poly(expr, x).terms():
        re_, im_ = sp.re(c), sp.im(c)
        out[e] = gaussian(Fraction(int(re_.p), int(re_.q)), Fraction(int(im_.p), int(im_.q)))
    return Poly(out, var)
