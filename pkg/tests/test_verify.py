import json
import random
from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import Z, rand_frac, rand_nonzero, small_fracs
from vortexlab.chains import adler_moser_sequence, adler_moser_translating, lambda2_sequence
from vortexlab.exact_core import Poly, to_mp
from vortexlab.functions import QuasiFactored as QF
from vortexlab.streets import SolitonSeed, even_street_sequence, soliton_tau
from vortexlab.verify import (CollisionError, VortexConfiguration, aberth_roots, cm_acceleration,
                              cm_integrate, cm_rhs, config_from_eigenfunction, config_from_polys,
                              external_residual, invariant_checks, reduce_strip, residual, residual_locus,
                              residual_static, residual_street, residual_translating, rho_to_z)

F = Fraction
z = Poly.gen()
TOL = 1e-9


def plane(zs, qs, k=0):
    return VortexConfiguration("plane", list(zs), list(qs), k)


def am_config(n, params):
    seq = adler_moser_sequence(n, params)
    return config_from_polys([(seq[n], 1), (seq[n - 1], -1)])


# -- roots ----------------------------------------------------------------------

def test_aberth_cube_roots():
    with mpmath.workprec(128):
        roots = aberth_roots(z ** 3 + 1)
        assert len(roots) == 3
        for r in roots:
            assert abs(r ** 3 + 1) < mpmath.mpf(10) ** -30
        exact = [mpmath.expj(mpmath.pi * (2 * k + 1) / 3) for k in range(3)]
        for e in exact:
            assert min(abs(e - r) for r in roots) < mpmath.mpf(10) ** -30


def test_aberth_multiplicities_and_degree():
    roots = aberth_roots((z - 1) ** 3 * (z + 2) ** 2 * z)
    assert len(roots) == 3
    p3 = adler_moser_sequence(3, {"s1": F(1), "s2": F(0)})[3]
    assert len(aberth_roots(p3)) == 6
    with pytest.raises(ValueError):
        aberth_roots(Poly.const(3))


def test_rho_to_z():
    rho = F(5, 3)
    with mpmath.workprec(128):
        zz = rho_to_z(to_mp(rho))
        assert 0 <= mpmath.re(zz) < mpmath.pi
        assert abs(mpmath.exp(2j * zz) - to_mp(rho)) < mpmath.mpf(10) ** -35
        assert abs(reduce_strip(zz + 3 * mpmath.pi) - zz) < mpmath.mpf(10) ** -35


# -- configurations ---------------------------------------------------------------

def test_config_from_am_ratio():
    p = adler_moser_sequence(2, {"s1": F(1)})
    conf = config_from_eigenfunction(QF.build([(p[2], 1), (p[1], -1)]))
    assert sorted(conf.strengths) == [-1, 1, 1, 1]
    origin = [q for x, q in zip(conf.positions, conf.strengths) if abs(x) < 1e-30]
    assert origin == [-1]
    for x, q in zip(conf.positions, conf.strengths):
        if q == 1:
            assert abs(x ** 3 + 1) < 1e-30
    assert residual_static(conf) < TOL


def test_config_from_even_street():
    (psi,) = even_street_sequence(1, [F(1, 3)])
    conf = config_from_eigenfunction(psi)
    assert conf.geometry == "cylinder"
    assert sorted(conf.strengths) == [F(-1, 2), F(-1, 2), 1, 1]
    halves = sorted(float(mpmath.re(x)) for x, q in zip(conf.positions, conf.strengths) if q == F(-1, 2))
    assert halves[0] == 0 and abs(halves[1] - float(mpmath.pi) / 2) < 1e-30
    assert residual_street(conf) < TOL


def test_config_rejects_wrong_geometry():
    with pytest.raises(ValueError):
        config_from_eigenfunction(QF.from_poly(z * z + 1), geometry="cylinder")
    with pytest.raises(ValueError):
        VortexConfiguration("sphere", [], [])
    with pytest.raises(ValueError):
        plane([0, 1], [1])


def test_coincident_positions_rejected():
    with pytest.raises(ValueError):
        plane([0, 0], [1, 1]).check_distinct()
    with pytest.raises(ValueError):
        residual_static(plane([0, 0], [1, 1]))


# -- residuals ----------------------------------------------------------------------

def test_static_residual_exact_oracle():
    with mpmath.workprec(128):
        conf = plane([0] + [mpmath.expj(mpmath.pi * (2 * k + 1) / 3) for k in range(3)], [-1, 1, 1, 1])
    assert residual_static(conf) < 1e-35
    # exact symbolic sum at the exact roots of z**3 + 1
    pts = [sp.Integer(0)] + list(sp.roots(Z ** 3 + 1, Z))
    qs = [-1, 1, 1, 1]
    for i, zi in enumerate(pts):
        total = sum(qs[j] / (zi - zj) for j, zj in enumerate(pts) if j != i)
        assert sp.simplify(sp.expand_complex(total)) == 0


def test_single_vortex_residuals():
    assert residual_static(plane([F(3, 2)], [1])) == 0
    assert cm_rhs(plane([1], [1])) == [0]
    assert external_residual(plane([0], [1]), Poly({2: F(-1, 2)})) == 0


def test_street_residual_symmetric_pair():
    with mpmath.workprec(128):
        conf = VortexConfiguration("cylinder", [0, mpmath.pi / 2], [1, 1])
    assert residual_street(conf) < 1e-35
    with pytest.raises(ValueError):
        residual_street(plane([0, 1], [1, 1]))
    with pytest.raises(ValueError):
        residual_static(conf)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_adler_moser_configurations(n):
    rng = random.Random(n)
    params = {f"s{k}": rand_frac(rng) for k in range(1, n)}
    conf = am_config(n, params)
    assert residual_static(conf) < TOL
    assert invariant_checks(conf).scaling_sum == 0
    assert max(abs(v) for v in cm_rhs(conf)) < TOL
    for q in (1, -1):
        pts = [x for x, s in zip(conf.positions, conf.strengths) if s == q]
        if len(pts) > 1:
            assert residual_locus(pts) < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lambda2_configurations(n):
    rng = random.Random(10 + n)
    plus = {"r1": rand_nonzero(rng), "s2": rand_nonzero(rng), "r2": rand_nonzero(rng), "s3": rand_nonzero(rng)}
    ps, qs = lambda2_sequence(n, "+", plus, final_p=False)
    species = [(q, c) for q, c in ((qs[n], 2), (ps[n - 1], -1)) if q.degree]
    conf = config_from_polys(species)
    assert residual_static(conf) < TOL
    assert invariant_checks(conf).scaling_sum == 0
    minus = {"s-1": rand_nonzero(rng), "r-2": rand_nonzero(rng), "s-2": rand_nonzero(rng),
             "r-3": rand_nonzero(rng), "s-3": rand_nonzero(rng)}
    if n <= 2:
        ps, qs = lambda2_sequence(n, "-", minus)
        conf = config_from_polys([(qs[n], 2), (ps[n], -1)])
        assert residual_static(conf) < TOL
        assert invariant_checks(conf).scaling_sum == 0


@pytest.mark.parametrize("j", [1, 2, 3])
def test_translating_configurations(j):
    rng = random.Random(20 + j)
    k = rand_nonzero(rng)
    params = {f"s{i}": rand_frac(rng) for i in range(1, j)}
    p, q = adler_moser_translating(j, k, params)
    assert p.degree == q.degree
    conf = config_from_polys([(p, 1), (q, -1)], k=k)
    assert invariant_checks(conf).neutrality_sum == 0
    assert residual_translating(conf) < TOL
    assert residual(conf) < TOL
    assert residual_translating(conf, k + 1) > 1e-3


def test_rigid_motion_invariance():
    rng = random.Random(30)
    conf = am_config(3, {"s1": rand_frac(rng), "s2": rand_frac(rng)})
    base = residual_static(conf)
    for _ in range(5):
        shift = mpmath.mpc(rng.uniform(-5, 5), rng.uniform(-5, 5))
        moved = plane([x + shift for x in conf.positions], conf.strengths)
        assert abs(residual_static(moved) - base) < 10 * TOL
    # exactly: translating z -> z - c maps the roots of P(z) to those of P(z - c)
    c = sp.Rational(2, 3) + sp.I / 5
    pts = [sp.Integer(0) + c] + [r + c for r in sp.roots(Z ** 3 + 1, Z)]
    qs = [-1, 1, 1, 1]
    for i, zi in enumerate(pts):
        assert sp.simplify(sum(qs[j] / (zi - zj) for j, zj in enumerate(pts) if j != i)) == 0


@settings(max_examples=15)
@given(small_fracs, small_fracs)
def test_am_residual_property(s1, s2):
    try:
        conf = am_config(3, {"s1": s1, "s2": s2})
    except ValueError:
        return  # colliding roots at special parameter values
    assert residual_static(conf) < TOL
    assert invariant_checks(conf).scaling_sum == 0


# -- locus ----------------------------------------------------------------------------

def test_locus_triangular():
    rng = random.Random(40)
    for n in (2, 3, 4):
        params = {f"s{k}": rand_frac(rng) for k in range(1, n)}
        p = adler_moser_sequence(n, params)[n]
        assert residual_locus(aberth_roots(p)) < 1e-8


def test_locus_rejects_two_points():
    rng = random.Random(41)
    for _ in range(5):
        a = mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = mpmath.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert residual_locus([a, b]) > 1e-3
    with pytest.raises(ValueError):
        residual_locus([1, 1])


def test_locus_soliton_roots():
    rng = random.Random(42)
    specs = [SolitonSeed(k, rand_nonzero(rng)) for k in (1, 2, 3)]
    tau = soliton_tau(specs)
    conf = config_from_eigenfunction(QF.build([(tau, 1)], var="xi"))
    assert residual_locus(conf.positions, "cylinder") < 1e-8


# -- invariants ------------------------------------------------------------------------

def test_invariant_examples():
    inv = invariant_checks(plane([0, 1, 2, 3], [-1, 1, 1, 1]))
    assert inv.scaling_sum == 0 and inv.neutrality_sum == 2
    assert invariant_checks(plane([0, 1], [1, 1])).scaling_sum == 1
    assert invariant_checks(plane([0, 1], [1, -1])).neutrality_sum == 0


# -- external field --------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_external_residual_hermite(n):
    # physicists' Hermite roots: sum_{j != i} 1/(x_i - x_j) = x_i
    h = [Poly.const(1), 2 * z]
    for m in range(1, n):
        h.append(2 * z * h[m] - h[m - 1] * (2 * m))
    conf = config_from_polys([(h[n], 1)])
    phi = Poly({2: F(-1, 2)})
    assert external_residual(conf, phi) < TOL
    conf.phi = phi
    assert residual(conf) < TOL


def test_external_residual_random_positions():
    rng = random.Random(43)
    conf = plane([mpmath.mpc(rng.random(), rng.random()) for _ in range(4)], [1, 1, -1, 1])
    assert external_residual(conf, Poly({2: F(-1, 2)})) > 1e-3


# -- dynamics ---------------------------------------------------------------------------

def test_integrator_step_from_equilibrium():
    conf = am_config(3, {"s1": F(1), "s2": F(-2)})
    dt = F(1, 100)
    traj = cm_integrate(conf, dt, 1)
    moved = max(abs(a - b) for a, b in zip(traj[0], traj[1]))
    assert moved < 10 * float(dt) * TOL


def test_second_difference_matches_acceleration():
    conf = plane([mpmath.mpc(0, 0), mpmath.mpc(2, 0.5), mpmath.mpc(-1, 2)], [1, 1, -1])
    dt = mpmath.mpf("1e-3")
    traj = cm_integrate(conf, dt, 2)
    acc = cm_acceleration(plane(traj[1], conf.strengths))
    for i in range(3):
        fd = (traj[2][i] - 2 * traj[1][i] + traj[0][i]) / dt ** 2
        assert abs(fd - acc[i]) < 1e-4 * max(1, abs(acc[i]))


def test_collision_guard():
    conf = plane([0, mpmath.mpf("1e-3")], [1, 1])
    with pytest.raises(CollisionError) as err:
        cm_integrate(conf, 1, 5)
    assert len(err.value.trajectory) == 1


# -- interchange -------------------------------------------------------------------------

def test_json_round_trip():
    conf = am_config(2, {"s1": F(3, 7)})
    conf.provenance = {"family": "adler_moser", "n": 2}
    doc = json.loads(conf.dumps())
    assert set(doc) == {"geometry", "k", "precision_bits", "vortices", "provenance"}
    back = VortexConfiguration.from_json(doc)
    assert back.strengths == conf.strengths
    assert back.provenance == conf.provenance
    with mpmath.workprec(128):
        for a, b in zip(back.positions, conf.positions):
            assert abs(a - b) < mpmath.mpf(10) ** -36
    assert residual_static(back) < TOL


def test_csv_export():
    conf = am_config(2, {"s1": F(1)})
    lines = conf.to_csv().strip().splitlines()
    assert lines[0] == "re,im,q"
    assert len(lines) == 1 + len(conf)
    assert sorted(line.rsplit(",", 1)[1] for line in lines[1:]) == ["-1/1", "1/1", "1/1", "1/1"]


@pytest.mark.parametrize("doc", [{}, {"geometry": "plane"}, {"geometry": "plane", "vortices": [{"z": [0]}]},
                                 {"geometry": "plane", "vortices": [{"z": ["a", 0], "q": "1"}]}])
def test_malformed_documents(doc):
    with pytest.raises(ValueError):
        VortexConfiguration.from_json(doc)


@given(st.lists(st.tuples(st.floats(0, 3), st.floats(-1, 1)), min_size=1, max_size=5))
def test_cylinder_positions_reduced(pts):
    conf = VortexConfiguration("cylinder", [mpmath.mpc(a + 7, b) for a, b in pts], [1] * len(pts))
    for x in conf.positions:
        assert 0 <= mpmath.re(x) < mpmath.pi
