import random
from fractions import Fraction

import pytest
import sympy as sp

from conftest import Z, rand_frac, rand_nonzero, to_sym
from vortexlab.chains import (adler_moser_sequence, adler_moser_translating, lambda2_sequence, x_chain,
                              x_constants)
from vortexlab.darboux import (SchrodingerOp, ThirdOrderOp, abel_triple, charge_map_holds, crum, darboux2,
                               darboux3, factorize3, kwcc, potential_from_eigenfunction, residue_free,
                               zero_level2)
from vortexlab.diffop import DiffOp, compose, third_order
from vortexlab.exact_core import Obstruction, Poly, RationalFunction
from vortexlab.functions import QuasiFactored as QF

F = Fraction
z = Poly.gen()
d = DiffOp.d()


def rf(p, q=None):
    return RationalFunction(p, q)


def ratio(num: Poly, den: Poly) -> QF:
    return QF.build([(num, 1), (den, -1)])


def log2(p: Poly) -> RationalFunction:
    """``(log p)''``."""
    return rf(p.diff(), p).diff()


# -- second order -------------------------------------------------------------------------

def test_darboux2_examples():
    k = F(3, 2)
    psi = QF.exp_linear(k)
    out = darboux2(psi, QF.from_poly(z))
    assert out == QF.build([(z * k - 1, 1), (z, -1)], k=k)
    assert darboux2(psi, psi).is_zero


def test_darboux2_step_of_adler_moser():
    rng = random.Random(1)
    for _ in range(5):
        s1, s2 = rand_frac(rng), rand_frac(rng)
        p = adler_moser_sequence(3, {"s1": s1, "s2": s2})
        kappa = ratio(p[2], p[1])
        # H_1 kappa = 0 with u_1 = -2 (log P_1)''
        h1 = SchrodingerOp.from_tau(p[1])
        assert h1.is_eigenfunction(kappa)
        assert h1.check_provenance()
        # the transformed potential is -2 (log P_2)''
        assert h1.transform(kappa).u == SchrodingerOp.from_tau(p[2]).u
        # a second eigenfunction of H_1 at zero level: P_0/P_1 = 1/z, mapped to a kernel element of H_2
        out = darboux2(ratio(p[0], p[1]), kappa)
        assert SchrodingerOp.from_tau(p[2]).is_eigenfunction(out)


def test_zero_level2_examples():
    s1 = F(-5, 4)
    assert zero_level2(QF.from_poly(z), s1) == ratio(z ** 3 + s1, z)
    c = F(2, 9)
    assert zero_level2(QF.one(), c) == QF.from_poly(z + c)
    # a genuine -1/2 charge at 0: kappa**2 = (z-1)**2/z has residue 1 there
    ob = zero_level2(QF.build([(z, F(-1, 2)), (z - 1, 1)]))
    assert isinstance(ob, Obstruction)
    assert isinstance(zero_level2(QF.build([(z, F(-1, 2)), (z * z - 1, 1)])), Obstruction)


def test_zero_level2_obstruction_iff_residue():
    rng = random.Random(2)
    for _ in range(30):
        a, b = rand_nonzero(rng, 5), rand_nonzero(rng, 5)
        e1, e2 = rng.choice([-2, -1, 1, 2]), rng.choice([-2, -1, 1, 2])
        if a == b:
            continue
        kappa = QF.build([(z - a, e1), (z - b, e2)])
        sq = to_sym((z - a) ** max(e1, 0) * (z - b) ** max(e2, 0)) ** 2 / \
            to_sym((z - a) ** max(-e1, 0) * (z - b) ** max(-e2, 0)) ** 2
        residues = [sp.residue(sq, Z, r) for r in (sp.Rational(a.numerator, a.denominator),
                                                   sp.Rational(b.numerator, b.denominator))]
        obstructed = isinstance(zero_level2(kappa), Obstruction)
        assert obstructed == any(r != 0 for r in residues)


def test_potential_from_eigenfunction_examples():
    _, ok = potential_from_eigenfunction(QF.from_poly(z * (z - 1)))
    assert not ok
    u, ok = potential_from_eigenfunction(QF.build([(z, F(1, 2))]))
    assert ok and u == rf(Poly.const(F(-1, 4)), z * z)
    u, _ = potential_from_eigenfunction(QF.exp_linear(F(2)), lam=-4)
    assert u.is_zero


def test_residue_free():
    assert residue_free(rf(Poly.const(1), (z - 1) ** 2))
    assert not residue_free(rf(Poly.const(1), z - 1))
    assert residue_free(rf(z * 0 + 1, (z - 1) ** 2) - rf(Poly.const(1), (z + 1) ** 2))


def test_potential_formula_for_equilibrium():
    # equilibrium psi with charges +-1: u = sum Q(Q-1)/(z-z_i)**2 = 2 sum over the -1 roots
    p = adler_moser_sequence(3, {"s1": F(2), "s2": F(-1)})
    psi = ratio(p[3], p[2])
    u, ok = potential_from_eigenfunction(psi)
    oracle = sp.simplify(sp.diff(sp.log(to_sym(p[3]) / to_sym(p[2])), Z, 2)
                         + sp.diff(sp.log(to_sym(p[3]) / to_sym(p[2])), Z) ** 2)
    assert sp.simplify(to_sym(u.num) / to_sym(u.den) - oracle) == 0
    assert ok
    # the simple-pole-free potential is -2 (log P_2)'' since P_3/P_2 is a zero mode of H_2
    assert u == -2 * log2(p[2])


def test_crum_matches_darboux2_and_translating():
    k = F(5, 3)
    psi = QF.exp_linear(k)
    seed = QF.from_poly(z)
    out, u = crum([seed], psi)
    assert out == darboux2(psi, seed)
    assert u == -2 * log2(z)
    for j in (2, 3):
        params = {"s1": F(1, 2), "s2": F(-3)}
        xs = [QF.from_poly(x) for x in x_chain(j, x_constants(j, params))]
        out, u = crum(xs, psi)
        p, q = adler_moser_translating(j, k, params)
        assert out.same_up_to_constant(QF.build([(p, 1), (q, -1)], k=k))
        assert u == -2 * log2(q)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_crum_potential_equals_iterated_steps(n):
    params = {"s1": F(1), "s2": F(2, 3), "s3": F(-1)}
    xs = [QF.from_poly(x) for x in x_chain(n, x_constants(n, params))]
    _, un = crum(xs[:-1], xs[-1])
    op = SchrodingerOp(rf(Poly(None)))
    seeds = list(xs)
    for i in range(n):
        kappa = seeds[i]
        op = op.transform(kappa)
        seeds = [darboux2(s, kappa) if j > i else s for j, s in enumerate(seeds)]
    assert op.u == crum(xs, QF.from_poly(z))[1]
    # the confluent X-chain Wronskian ratio is P_n / P_{n-1}
    p = adler_moser_sequence(n, params)
    top, _ = crum(xs[:-1], xs[-1])
    assert top.same_up_to_constant(ratio(p[n], p[n - 1]))
    assert un == -2 * log2(p[n - 1])


def test_crum_rejects_dependent_seeds():
    with pytest.raises(ValueError):
        crum([QF.from_poly(z), QF.from_poly(z * 2)], QF.one())


def test_kwcc_gamma_one_is_zero_level():
    kappa = QF.from_poly(z)
    assert kwcc(kappa, 1, F(3)) == zero_level2(kappa, F(3))
    with pytest.raises(ValueError):
        kwcc(kappa, 3)


def test_kwcc_regenerates_lambda2_ratios():
    rng = random.Random(3)
    for _ in range(3):
        params = {"r1": rand_frac(rng), "s2": rand_frac(rng), "r2": rand_frac(rng), "s3": rand_frac(rng)}
        ps, qs = lambda2_sequence(3, "+", params, final_p=False)
        # q_i**2/p_{i-1} -> p_i**(1/2)/q_i -> q_{i+1}**2/p_i
        for i in range(1, 3):
            psi = QF.build([(qs[i], 2), (ps[i - 1], -1)])
            half = kwcc(psi, F(1, 2), params[f"r{i}"])
            assert half == QF.build([(ps[i], F(1, 2)), (qs[i], -1)])
            nxt = kwcc(half, 2, params[f"s{i + 1}"])
            assert nxt == QF.build([(qs[i + 1], 2), (ps[i], -1)])


def test_kwcc_charge_map_on_created_charges():
    out = kwcc(QF.one(), 2, F(1, 3))
    assert out == QF.build([(z + F(1, 3), 2)])
    assert charge_map_holds(QF.one(), out, 2)


# -- third order --------------------------------------------------------------------------

def test_factorize3_examples():
    f = factorize3(QF.from_poly(z))
    assert f.u == rf(Poly(None))
    f2 = factorize3(QF.from_poly(z * z))
    assert f2.u == rf(Poly(None))
    # kappa = z**a gives u = (a-1)(a-2)/z**2; 12/z**2 appears at a = 5 and a = -2
    assert factorize3(QF.from_poly(z ** 5)).u == rf(Poly.const(12), z * z)
    assert factorize3(QF.build([(z, -2)])).u == rf(Poly.const(12), z * z)
    rng = random.Random(4)
    for _ in range(5):
        kappa = ratio(z ** 3 + rand_frac(rng) * z + rand_frac(rng), z * z + rand_nonzero(rng))
        f = factorize3(kappa)
        assert compose(f.b, f.a) == third_order(f.u)
        assert ThirdOrderOp(f.u).annihilates(kappa)


def test_darboux3_from_z_and_iterate():
    rng = random.Random(5)
    for _ in range(5):
        a, b = rand_frac(rng), rand_frac(rng)
        s2, r1 = 20 * a, 5 * b
        hat = darboux3(QF.from_poly(z), a, b)
        assert hat == ratio(z ** 5 + s2 * z - 4 * r1, z)
        hat2 = darboux3(hat, rand_frac(rng), rand_frac(rng))
        q3 = hat2.as_rational().num
        triple = abel_triple(hat, hat2)
        defect, c = triple.defect()
        assert defect.is_zero and c != 0
        # read r_2, s_3 off p_2 and q_3 and compare with the chain
        p2 = triple.p.monic()
        params = {"r1": r1, "s2": s2, "r2": p2.coeff(5), "s3": q3.coeff(5)}
        ps, qs = lambda2_sequence(3, "+", params, final_p=False)
        assert hat2.as_rational().den == qs[2]
        assert q3 == qs[3]
        assert p2 == ps[2]
        # Abel1 for the first step: q_+' q - q_+ q' is a multiple of p
        t1 = abel_triple(QF.from_poly(z), hat)
        assert t1.p.monic() == ps[1]


def test_darboux3_potential_update():
    kappa = QF.from_poly(z)
    u1 = ThirdOrderOp(rf(Poly(None))).transform(kappa).u
    assert u1 == log2(z) * -6
    assert third_order(u1) == DiffOp({3: 1, 1: rf(Poly.const(-6), z * z)})
    hat = darboux3(kappa, F(1), F(2))
    u2 = ThirdOrderOp(u1).transform(hat).u
    _, qs = lambda2_sequence(2, "+", {"r1": F(10), "s2": F(20)}, final_p=False)
    assert u2 == log2(qs[2]) * -6


def test_charge_map_property_across_families():
    rng = random.Random(6)
    for _ in range(5):
        params = {f"s{k}": rand_frac(rng) for k in range(1, 5)}
        p = adler_moser_sequence(5, params)
        for n in range(1, 5):
            before, after = ratio(p[n], p[n - 1]), ratio(p[n + 1], p[n])
            assert charge_map_holds(before, after, 1)
            assert potential_from_eigenfunction(after)[1]


def test_equilibrium_preservation_third_order():
    rng = random.Random(7)
    # nonzero parameters keep consecutive q's coprime
    params = {name: rand_nonzero(rng) for name in ("r1", "s2", "r2", "s3")}
    ps, qs = lambda2_sequence(3, "+", params, final_p=False)
    for i in range(1, 3):
        kappa = ratio(qs[i + 1], qs[i])
        assert ThirdOrderOp(log2(qs[i]) * -6).annihilates(kappa)
        hat = darboux3(kappa, 0, 0)
        assert isinstance(hat, QF)
        assert hat.as_rational().den == qs[i + 1]
        assert charge_map_holds(kappa, hat, 1)
        assert ThirdOrderOp(log2(qs[i + 1]) * -6).annihilates(hat)
