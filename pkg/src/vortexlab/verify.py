"""Numeric checks of vortex configurations.

Roots are found by Aberth iteration in multiprecision on square-free
parts.  Configurations on the plane use the kernel ``1/(z_i - z_j)``;
configurations on the cylinder (period ``pi``) use ``cot(z_i - z_j)``.
Strengths stay exact rationals throughout.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .exact_core import Poly, as_scalar, squarefree_decomposition, to_mp
from .functions import QuasiFactored

DEFAULT_PRECISION = 128
ROOT_TOL = mpmath.mpf("1e-30")
EQUILIBRIUM_TOL = 1e-9


def default_precision() -> int:
    env = os.environ.get("VORTEXLAB_PRECISION_BITS")
    return int(env) if env else DEFAULT_PRECISION


class RootFindingError(ArithmeticError):
    """Aberth iteration did not converge; ``partial`` holds the last iterates."""

    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


class CollisionError(ArithmeticError):
    """Two vortices came closer than the integrator's guard allows."""

    def __init__(self, message: str, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


# -- roots ----------------------------------------------------------------------

def _aberth(coeffs: list, tol, max_iter: int):
    """Simple roots of ``sum coeffs[k] x**k`` (mp complex coefficients, top nonzero)."""
    n = len(coeffs) - 1
    if n == 1:
        return [-coeffs[0] / coeffs[1]]
    lead = coeffs[-1]
    monic = [c / lead for c in coeffs]
    # Fujiwara-type radius from coefficient magnitudes
    radius = 2 * max(abs(monic[n - k]) ** (mpmath.mpf(1) / k) for k in range(1, n + 1))
    radius = max(radius, mpmath.mpf("1e-6"))
    centre = -monic[n - 1] / n
    roots = [centre + radius * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.4")) *
             (1 + mpmath.mpf(k % 3) / 50) for k in range(n)]
    deriv = [k * monic[k] for k in range(1, n + 1)]

    def horner(cs, x):
        acc = mpmath.mpc(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    for _ in range(max_iter):
        worst = 0
        new = list(roots)
        for i, x in enumerate(roots):
            px = horner(monic, x)
            if px == 0:
                continue
            ratio = px / horner(deriv, x)
            s = mpmath.fsum(1 / (x - y) for j, y in enumerate(roots) if j != i)
            step = ratio / (1 - ratio * s)
            new[i] = x - step
            worst = max(worst, abs(step) / max(1, abs(x)))
        roots = new
        if worst < tol:
            break
    else:
        raise RootFindingError("Aberth iteration did not converge", roots)
    # backward-error check
    for x in roots:
        scale = mpmath.fsum(abs(c) * abs(x) ** k for k, c in enumerate(monic))
        if abs(horner(monic, x)) > tol * scale * 1e3:
            raise RootFindingError("root residual above tolerance", roots)
    return roots


def aberth_roots(p: Poly, precision_bits: int | None = None, tol=None, max_iter: int = 1000):
    """Distinct roots of ``p`` in its own variable, as mp complex numbers.

    Multiplicities are removed first (square-free decomposition), so each
    distinct root appears once.  Laurent polynomials are stripped of their
    monomial factor; a root at the origin is reported if that factor has a
    positive exponent.
    """
    bits = precision_bits or default_precision()
    tol = mpmath.mpf(tol) if tol is not None else ROOT_TOL
    if p.is_zero or p.degree == p.low:
        if p and p.low > 0:
            return [mpmath.mpc(0)]
        raise ValueError("polynomial has no roots to find")
    out = []
    with mpmath.workprec(bits):
        for base, _ in squarefree_decomposition(p):
            if base.degree == 1 and base.coeff(0) == 0:
                out.append(mpmath.mpc(0))
                continue
            coeffs = [to_mp(base.coeff(k)) for k in range(base.degree + 1)]
            out.extend(_aberth([mpmath.mpc(c) for c in coeffs], tol, max_iter))
    return out


def reduce_strip(z):
    """Representative with ``0 <= Re z < pi``."""
    re = mpmath.re(z)
    shift = mpmath.floor(re / mpmath.pi)
    z = z - shift * mpmath.pi
    if mpmath.re(z) >= mpmath.pi:
        z -= mpmath.pi
    return mpmath.mpc(z)


def rho_to_z(rho):
    """``z`` with ``exp(2 i z) = rho``, reduced to the fundamental strip."""
    return reduce_strip(-0.5j * mpmath.log(rho))


def _complex(x):
    """mp complex from an exact scalar or any numeric value."""
    if isinstance(x, (mpmath.mpc, mpmath.mpf, complex, float)):
        return mpmath.mpc(x)
    return mpmath.mpc(to_mp(as_scalar(x)))


# -- configurations --------------------------------------------------------------

@dataclass
class VortexConfiguration:
    geometry: str
    positions: list
    strengths: list
    k: object = 0
    provenance: dict = field(default_factory=dict)
    precision_bits: int = DEFAULT_PRECISION
    phi: Poly | None = None

    def __post_init__(self):
        if self.geometry not in ("plane", "cylinder"):
            raise ValueError("geometry must be 'plane' or 'cylinder'")
        if len(self.positions) != len(self.strengths):
            raise ValueError("positions and strengths differ in length")
        self.strengths = [Fraction(as_scalar(q)) for q in self.strengths]
        with mpmath.workprec(self.precision_bits):
            self.positions = [_complex(z) for z in self.positions]
            if self.geometry == "cylinder":
                self.positions = [reduce_strip(z) for z in self.positions]
            self.k = _complex(self.k)

    def __len__(self) -> int:
        return len(self.positions)

    def min_separation(self):
        best = mpmath.inf
        zs = self.positions
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                d = zs[i] - zs[j]
                if self.geometry == "cylinder":
                    d = abs(mpmath.sin(d))
                else:
                    d = abs(d)
                best = min(best, d)
        return best

    def check_distinct(self, tol=None):
        tol = ROOT_TOL if tol is None else tol
        if len(self) > 1 and self.min_separation() <= 10 * tol:
            raise ValueError("coincident vortex positions")

    # -- interchange ---------------------------------------------------------

    def to_json(self) -> dict:
        digits = int(self.precision_bits * 0.30103) + 2
        with mpmath.workprec(self.precision_bits):
            return {
                "geometry": self.geometry,
                "k": [mpmath.nstr(mpmath.re(self.k), digits), mpmath.nstr(mpmath.im(self.k), digits)],
                "precision_bits": self.precision_bits,
                "vortices": [{"z": [mpmath.nstr(mpmath.re(z), digits), mpmath.nstr(mpmath.im(z), digits)],
                              "q": f"{q.numerator}/{q.denominator}"}
                             for z, q in zip(self.positions, self.strengths)],
                "provenance": self.provenance,
            }

    @classmethod
    def from_json(cls, doc: dict) -> "VortexConfiguration":
        try:
            bits = int(doc.get("precision_bits", DEFAULT_PRECISION))
            with mpmath.workprec(bits):
                k = doc.get("k", [0, 0])
                kk = mpmath.mpc(mpmath.mpf(str(k[0])), mpmath.mpf(str(k[1])))
                zs, qs = [], []
                for v in doc["vortices"]:
                    zs.append(mpmath.mpc(mpmath.mpf(str(v["z"][0])), mpmath.mpf(str(v["z"][1]))))
                    qs.append(Fraction(str(v["q"])))
                return cls(doc["geometry"], zs, qs, kk, dict(doc.get("provenance", {})), bits)
        except (KeyError, TypeError, IndexError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed configuration document: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def to_csv(self) -> str:
        digits = int(self.precision_bits * 0.30103) + 2
        lines = ["re,im,q"]
        for z, q in zip(self.positions, self.strengths):
            lines.append(f"{mpmath.nstr(mpmath.re(z), digits)},{mpmath.nstr(mpmath.im(z), digits)},"
                         f"{q.numerator}/{q.denominator}")
        return "\n".join(lines) + "\n"


def _even_part(base: Poly) -> Poly | None:
    """``B`` with ``base = B(v**2)`` (in the auxiliary tag), or None."""
    if any(e % 2 for e in base.exponents()):
        return None
    return Poly({e // 2: c for e, c in base.items()}, "x")


def _reflect(base: Poly) -> Poly:
    return Poly({e: (-c if e % 2 else c) for e, c in base.items()}, base.var).monic()


def _paired_bases(f: QuasiFactored):
    """Bases as polynomials in the squared variable; odd bases must come with their reflection."""
    pending = {}
    out = []
    for b, e in f.factors:
        if b.degree == 1 and b.coeff(0) == 0:
            out.append((None, e))
            continue
        even = _even_part(b)
        if even is not None:
            out.append((even, e))
            continue
        partner = _reflect(b)
        key = (partner, e)
        if key in pending:
            pending.pop(key)
            out.append((_even_part(b * partner), e))
        else:
            pending[(b, e)] = True
    if pending:
        raise ValueError("factor without its reflected partner: not single-valued in z")
    return out


def config_from_eigenfunction(f: QuasiFactored, geometry: str | None = None,
                              precision_bits: int | None = None, provenance: dict | None = None,
                              tol=None) -> VortexConfiguration:
    """One vortex per root of each base, with the base's exponent as strength.

    Tags: ``z`` gives a plane configuration; ``w`` (``z = w**2``) gives a
    plane configuration with the base ``w`` at the origin carrying half its
    exponent; ``xi`` (``xi = exp(i z)``) gives a cylinder configuration, where
    the background is corrected by ``i * sum(Q * deg)`` of the bases in
    ``xi**2``.
    """
    bits = precision_bits or default_precision()
    var = f.var
    geometry = geometry or ("cylinder" if var == "xi" else "plane")
    if (geometry == "cylinder") != (var == "xi"):
        raise ValueError(f"tag {var!r} does not describe a {geometry} configuration")
    if f.is_zero:
        raise ValueError("zero function has no configuration")
    zs, qs = [], []
    with mpmath.workprec(bits):
        if var in ("z", "x"):
            for b, e in f.factors:
                for r in aberth_roots(b, bits, tol):
                    zs.append(r)
                    qs.append(e)
        else:
            for base, e in _paired_bases(f):
                if base is None:
                    if var == "w":
                        zs.append(mpmath.mpc(0))
                        qs.append(e / 2)
                    continue
                for r in aberth_roots(base, bits, tol):
                    zs.append(r if var == "w" else rho_to_z(r))
                    qs.append(e)
        kk = to_mp(f.k)
        if var == "xi":
            shift = sum((e * base.degree for base, e in _paired_bases(f) if base is not None), Fraction(0))
            kk = mpmath.mpc(kk) + 1j * to_mp(shift)
        conf = VortexConfiguration(geometry, zs, qs, kk, dict(provenance or {}), bits,
                                   f.phi if f.phi else None)
    conf.check_distinct(tol)
    return conf


def config_from_polys(species: Iterable[tuple[Poly, object]], k=0, geometry: str = "plane",
                      precision_bits: int | None = None, provenance: dict | None = None) -> VortexConfiguration:
    """Configuration with strength ``Q`` at every distinct root of each polynomial."""
    species = list(species)
    var = species[0][0].var
    f = QuasiFactored.build([(p, q) for p, q in species], k=k, var=var)
    return config_from_eigenfunction(f, geometry, precision_bits, provenance)


# -- residuals -------------------------------------------------------------------

def _kernel(c: VortexConfiguration):
    if c.geometry == "cylinder":
        return mpmath.cot
    return lambda d: 1 / d


def _field(c: VortexConfiguration, i: int):
    kern = _kernel(c)
    zi = c.positions[i]
    total = mpmath.mpc(0)
    for j, (zj, qj) in enumerate(zip(c.positions, c.strengths)):
        if j != i:
            d = zi - zj
            if d == 0:
                raise ValueError("coincident vortex positions")
            total += to_mp(qj) * kern(d)
    return total


def _max_residual(c: VortexConfiguration, offset) -> mpmath.mpf:
    with mpmath.workprec(c.precision_bits):
        worst = mpmath.mpf(0)
        for i in range(len(c)):
            worst = max(worst, abs(offset(i) + _field(c, i)))
        return worst


def residual_static(c: VortexConfiguration):
    """``max_i |sum_{j != i} Q_j / (z_i - z_j)|`` (plane)."""
    if c.geometry != "plane":
        raise ValueError("plane geometry required")
    return _max_residual(c, lambda i: 0)


def residual_translating(c: VortexConfiguration, k=None):
    """``max_i |k + sum_{j != i} Q_j / (z_i - z_j)|`` (plane)."""
    if c.geometry != "plane":
        raise ValueError("plane geometry required")
    kk = c.k if k is None else _complex(k)
    return _max_residual(c, lambda i: kk)


def residual_street(c: VortexConfiguration, k=None):
    """``max_i |k + sum_{j != i} Q_j cot(z_i - z_j)|`` (cylinder)."""
    if c.geometry != "cylinder":
        raise ValueError("cylinder geometry required")
    kk = c.k if k is None else _complex(k)
    return _max_residual(c, lambda i: kk)


def residual(c: VortexConfiguration):
    """The residual matching the configuration's geometry, with its own background."""
    if c.geometry == "cylinder":
        return residual_street(c)
    if c.phi is not None:
        return external_residual(c, c.phi)
    return residual_translating(c)


def residual_locus(positions: Sequence, geometry: str = "plane", precision_bits: int | None = None):
    """Plane: ``max_i |sum (z_i - z_j)**-3|``; cylinder: ``max_i |sum cos/sin**3|``."""
    bits = precision_bits or default_precision()
    with mpmath.workprec(bits):
        zs = [mpmath.mpc(z) for z in positions]
        worst = mpmath.mpf(0)
        for i, zi in enumerate(zs):
            total = mpmath.mpc(0)
            for j, zj in enumerate(zs):
                if j == i:
                    continue
                d = zi - zj
                if d == 0:
                    raise ValueError("coincident positions")
                if geometry == "plane":
                    total += d ** -3
                else:
                    total += mpmath.cos(d) / mpmath.sin(d) ** 3
            worst = max(worst, abs(total))
        return worst


@dataclass(frozen=True)
class Invariants:
    scaling_sum: Fraction
    neutrality_sum: Fraction


def invariant_checks(c: VortexConfiguration) -> Invariants:
    """Exact ``sum_{i<j} Q_i Q_j`` and ``sum_i Q_i``."""
    qs = c.strengths
    total = sum(qs, Fraction(0))
    squares = sum((q * q for q in qs), Fraction(0))
    return Invariants((total * total - squares) / 2, total)


def external_residual(c: VortexConfiguration, phi: Poly):
    """``max_i |Phi'(z_i) + sum_{j != i} Q_j / (z_i - z_j)|`` (plane)."""
    if c.geometry != "plane":
        raise ValueError("plane geometry required")
    dphi = phi.dvar()
    with mpmath.workprec(c.precision_bits):
        coeffs = [(e, to_mp(v)) for e, v in dphi.items()]

        def offset(i):
            z = c.positions[i]
            return mpmath.fsum(v * z ** e for e, v in coeffs) if coeffs else 0

        return _max_residual(c, offset)


# -- Calogero-Moser dynamics --------------------------------------------------------

def cm_rhs(c: VortexConfiguration) -> list:
    """``dz_i/dt = 2 sum_{j != i} Q_j / (z_i - z_j)``."""
    if c.geometry != "plane":
        raise ValueError("plane geometry required")
    with mpmath.workprec(c.precision_bits):
        return [2 * _field(c, i) for i in range(len(c))]


def cm_acceleration(c: VortexConfiguration) -> list:
    """``-4 sum_{j != i} Q_j (Q_i + Q_j) / (z_i - z_j)**3`` (second-order form)."""
    with mpmath.workprec(c.precision_bits):
        out = []
        for i, (zi, qi) in enumerate(zip(c.positions, c.strengths)):
            acc = mpmath.mpc(0)
            for j, (zj, qj) in enumerate(zip(c.positions, c.strengths)):
                if j != i:
                    acc += to_mp(qj * (qi + qj)) / (zi - zj) ** 3
            out.append(-4 * acc)
        return out


def _moved(c: VortexConfiguration, zs) -> VortexConfiguration:
    return VortexConfiguration(c.geometry, zs, c.strengths, c.k, c.provenance, c.precision_bits)


def cm_integrate(c: VortexConfiguration, dt, steps: int) -> list[list]:
    """Classical fourth-order Runge-Kutta trajectory (``steps + 1`` snapshots).

    Aborts with :class:`CollisionError` when the minimum separation drops
    below ``10 * dt * max speed``.
    """
    with mpmath.workprec(c.precision_bits):
        dt = mpmath.re(_complex(dt))
        zs = list(c.positions)
        traj = [zs]
        for _ in range(steps):
            cur = _moved(c, zs)
            k1 = cm_rhs(cur)
            speed = max((abs(v) for v in k1), default=0)
            if len(zs) > 1 and cur.min_separation() < 10 * dt * speed:
                raise CollisionError("vortices too close for the step size", traj)
            k2 = cm_rhs(_moved(c, [z + dt / 2 * v for z, v in zip(zs, k1)]))
            k3 = cm_rhs(_moved(c, [z + dt / 2 * v for z, v in zip(zs, k2)]))
            k4 = cm_rhs(_moved(c, [z + dt * v for z, v in zip(zs, k3)]))
            zs = [z + dt / 6 * (a + 2 * b + 2 * e + d) for z, a, b, e, d in zip(zs, k1, k2, k3, k4)]
            traj.append(zs)
        return traj


__all__ = [
    "CollisionError", "Invariants", "RootFindingError", "VortexConfiguration", "aberth_roots",
    "cm_acceleration", "cm_integrate", "cm_rhs", "config_from_eigenfunction", "config_from_polys",
    "default_precision", "external_residual", "invariant_checks", "reduce_strip", "residual",
    "residual_locus", "residual_static", "residual_street", "residual_translating", "rho_to_z",
]
