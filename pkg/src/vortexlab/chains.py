"""Planar polynomial families and their exact equilibrium residuals.

Every recurrence step solves a first-order relation

    f' g - f g' = C * h

for the next monic polynomial ``f``.  The coefficient of ``f`` at
``z**deg(g)`` is the free integration constant of the step; it is set to the
named parameter (``s_i`` for ``q``-type members, ``r_i`` for ``p``-type).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact_core import (Obstruction, Poly, fraction_free_det, Scalar, as_scalar, parse_scalar,
                         poly_gcd, solve_first_order)
from .functions import polynomial_wronskian

FAMILIES = ("adler_moser", "lambda2_plus", "lambda2_minus", "even_bispectral", "kwcc",
            "lambda2_terminating")

Z = Poly.gen("z")
W = Poly.gen("w")


class ChainTermination(Exception):
    """Raised by the sequence helpers when a step is obstructed."""

    def __init__(self, index: int, obstruction: Obstruction):
        super().__init__(f"step {index} obstructed: {obstruction.reason} ({obstruction.residue})")
        self.index = index
        self.obstruction = obstruction


def param_name(letter: str, index: int) -> str:
    return f"{letter}{index}"


def _param(params: Mapping[str, object], name: str, default=None) -> Scalar:
    if name in params:
        return as_scalar(params[name])
    if default is not None:
        return as_scalar(default)
    raise KeyError(f"missing parameter {name}")


# -- residuals ----------------------------------------------------------------

def bilinear_residual(p: Poly, q: Poly, lam) -> Poly:
    """``p'' q - 2 lam p' q' + lam**2 p q''``."""
    lam = as_scalar(lam)
    p1, q1 = p.diff(), q.diff()
    return p.diff(2) * q - (p1 * q1).scale(2 * lam) + (p * q.diff(2)).scale(lam * lam)


def _proper(p: Poly) -> Poly:
    return p.normalized()[0] if p.var == "xi" else p


def polylinear_residual(species: Sequence[tuple[Poly, object]]) -> Poly:
    """``(prod P_i**2) * (sum L_i**2 P_i''/P_i + 2 sum_{i<j} L_i L_j P_i' P_j'/(P_i P_j))``.

    For two species ``(p, 1), (q, -lam)`` this is ``p*q`` times the bilinear residual.
    """
    polys = [p for p, _ in species]
    lams = [as_scalar(l) for _, l in species]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            g = poly_gcd(_proper(polys[i]), _proper(polys[j]))
            if g.degree:
                raise ValueError(f"species {i} and {j} share roots")
    var = polys[0].var
    n = len(polys)
    squares = [p * p for p in polys]

    def prod_except(skip: set) -> Poly:
        out = Poly.const(1, var)
        for k in range(n):
            if k not in skip:
                out = out * squares[k]
        return out

    total = Poly(None, var)
    for i in range(n):
        total = total + (polys[i].diff(2) * polys[i] * prod_except({i})).scale(lams[i] ** 2)
    for i in range(n):
        for j in range(i + 1, n):
            term = polys[i].diff() * polys[j].diff() * polys[i] * polys[j] * prod_except({i, j})
            total = total + term.scale(2 * lams[i] * lams[j])
    return total


def generalized_tkachenko_residual(p: Poly, q: Poly, a, lam=1) -> Poly:
    """``z * [p''q - 2L p'q' + L**2 pq'' + (2aL/z)(L q'p - p'q)]`` (denominator cleared).

    Describes a third species of strength ``a*L`` sitting at the origin.
    """
    a, lam = as_scalar(a), as_scalar(lam)
    zz = Z if p.var == "z" else W * W
    core = bilinear_residual(p, q, lam)
    cross = (q.diff() * p).scale(lam) - p.diff() * q
    return zz * core + cross.scale(2 * a * lam)


# -- degree laws --------------------------------------------------------------

def kwcc_degrees(gamma0, d1, count: int) -> tuple[list[Fraction], list[Fraction]]:
    """Degrees ``d_0..d_{count}`` and strengths ``gamma_0..`` of a KWCC chain."""
    g = Fraction(gamma0)
    ds = [Fraction(0), Fraction(d1)]
    gs = [g]
    for i in range(1, count):
        gs.append(1 / gs[-1])
        ds.append(2 * gs[i] * ds[i] - ds[i - 1] + 1)
    return ds[:count + 1], gs


def degree_law(family: str, i: int, **kw):
    """Closed-form degrees.

    ``"lambda1"``/``"lambda2"``: the pair ``(l_i, m_i)``; ``"adler_moser"``:
    ``deg P_i``; ``"kwcc"``: ``d_i`` for ``gamma0`` and ``d1`` keywords.
    """
    if family in ("lambda1",):
        return i * (2 * i + 1), i * (2 * i - 1)
    if family in ("lambda2", "lambda2_plus", "lambda2_minus"):
        return i * (3 * i + 2), Fraction(i * (3 * i - 1), 2)
    if family == "adler_moser":
        return i * (i + 1) // 2
    if family == "even_bispectral":
        return kwcc_degrees(1, Fraction(1, 2), max(i, 1))[0][i]
    if family == "kwcc":
        return kwcc_degrees(kw["gamma0"], kw["d1"], max(i, 1))[0][i]
    if family == "lambda2_terminating":
        return kwcc_degrees(2, 2, max(i, 1))[0][i]
    raise ValueError(f"unknown family {family!r}")


# -- Adler-Moser --------------------------------------------------------------

def adler_moser_sequence(n: int, params: Mapping[str, object]) -> list[Poly]:
    """``P_0..P_n`` from ``P'_{k+1}P_{k-1} - P'_{k-1}P_{k+1} = (2k+1) P_k**2``.

    Each step is solved by triangular back-substitution; the free
    coefficient of ``z**deg P_{k-1}`` is set to ``s_k``.
    """
    seq = [Poly.const(1), Z]
    for k in range(1, n):
        prev, cur = seq[k - 1], seq[k]
        nxt = _step(prev, (cur * cur).scale(2 * k + 1), _param(params, param_name("s", k)), k + 1)
        if nxt.lead != 1:
            raise ArithmeticError("Adler-Moser step lost monic normalization")
        seq.append(nxt)
    return seq[:n + 1]


def x_chain(n: int, constants: Sequence[Scalar] = ()) -> list[Poly]:
    """``X_1 = z``, ``X_{k+1}'' = (2k+1) X_k`` with constant term ``constants[k-1]``."""
    xs = [Z]
    for k in range(1, n):
        prev = xs[-1]
        integral = Poly({e + 2: v * (2 * k + 1) / ((e + 1) * (e + 2)) for e, v in prev.items()})
        b = as_scalar(constants[k - 1]) if k - 1 < len(constants) else Fraction(0)
        xs.append(integral + b)
    return xs


def x_constants(n: int, params: Mapping[str, object]) -> list[Scalar]:
    """Constants of ``X_2..X_n`` for which ``W[X_1..X_n]`` is in ``s``-normal form."""
    constants: list[Scalar] = []
    for k in range(2, n + 1):
        base = x_chain(k, constants + [0])
        w0 = polynomial_wronskian(base)
        dw = polynomial_wronskian(base[:-1] + [Poly.const(1)])
        e = degree_law("adler_moser", k - 2)
        target = _param(params, param_name("s", k - 1))
        slope = dw.coeff(e)
        if slope == 0:
            raise ArithmeticError("integration constant does not reach the normal-form coefficient")
        constants.append((target - w0.coeff(e)) / slope)
    return constants


def adler_moser_wronskian(n: int, params: Mapping[str, object]) -> Poly:
    """``P_n = W[X_1..X_n]`` with the constants chosen to match the ``s``-normal form."""
    if n == 0:
        return Poly.const(1)
    return polynomial_wronskian(x_chain(n, x_constants(n, params)))


def adler_moser_translating(j: int, k, params: Mapping[str, object] | None = None) -> tuple[Poly, Poly]:
    """``(p_j, q_j)`` with ``p_j e^{kz} = W[X_1..X_j, e^{kz}]`` and ``q_j = W[X_1..X_j] = P_j``.

    ``p_j e^{kz}/q_j`` is the rational Baker-Akhiezer function; for
    ``k != 0`` both polynomials have the same degree.
    """
    params = params or {}
    k = as_scalar(k)
    if j == 0:
        return Poly.const(1), Poly.const(1)
    xs = x_chain(j, x_constants(j, params))
    rows = [list(xs) + [Poly.const(1)]]
    for m in range(1, j + 1):
        rows.append([x.diff() for x in rows[-1][:-1]] + [Poly.const(k ** m)])
    p = fraction_free_det(rows)
    return p, polynomial_wronskian(xs)


def adler_moser(n: int, params: Mapping[str, object] | None = None, crosscheck: bool = True) -> Poly:
    """Monic Adler-Moser polynomial ``P_n`` in ``s``-normal form.

    Built by the first-order recurrence; with ``crosscheck`` it is also
    built as a Wronskian of the ``X`` chain and the two must agree.
    """
    params = params or {}
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = adler_moser_sequence(n, params)[n]
    if crosscheck and n >= 2:
        other = adler_moser_wronskian(n, params)
        if other != p:
            raise ArithmeticError("recurrence and Wronskian constructions disagree")
    return p


# -- Lambda = 2 main chain ----------------------------------------------------

def _step(known: Poly, rhs: Poly, free, index: int, top=None) -> Poly:
    f = solve_first_order(known, rhs, top=top, free=free)
    if isinstance(f, Obstruction):
        raise ChainTermination(index, f)
    return f


def lambda2_sequence(n: int, branch: str, params: Mapping[str, object],
                     final_p: bool = True) -> tuple[list[Poly], list[Poly]]:
    """``(p_0..p_{+-n}, q_0..q_{+-n})`` of the Lambda=2 chain in the given direction.

    With ``final_p=False`` the plus branch stops after ``q_n`` (so ``r_n`` is
    not needed and ``p`` has one entry fewer).
    """
    one = Poly.const(1)
    ps, qs = [one], [one]
    if branch in ("+", "plus", 1):
        for i in range(n):
            l_i, m_i = degree_law("lambda2", i)
            l_n, m_n = degree_law("lambda2", i + 1)
            c_q = l_i - 2 * m_i + 1
            q = _step(qs[i], ps[i].scale(c_q), _param(params, param_name("s", i + 1), 0 if i == 0 else None), i + 1)
            qs.append(q)
            if i == n - 1 and not final_p:
                break
            c_p = 4 * m_n - 2 * l_i + 1
            p = _step(ps[i], (q ** 4).scale(c_p), _param(params, param_name("r", i + 1)), i + 1)
            ps.append(p)
    elif branch in ("-", "minus", -1):
        for j in range(n):
            i = -j
            l_i, m_i = degree_law("lambda2", i)
            l_d, m_d = degree_law("lambda2", i - 1)
            c_p = 4 * m_i - 2 * l_i + 1
            p = _step(ps[j], (qs[j] ** 4).scale(c_p), _param(params, param_name("r", i - 1), 0 if j == 0 else None), i - 1)
            ps.append(p)
            c_q = l_d - 2 * m_i + 1
            q = _step(qs[j], p.scale(c_q), _param(params, param_name("s", i - 1)), i - 1)
            qs.append(q)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return ps, qs


def lambda2_chain(n: int, branch: str = "+", params: Mapping[str, object] | None = None) -> tuple[Poly, Poly]:
    """``(p_{+-n}, q_{+-n})``; parameters named ``s2, r1, ...`` or ``s-1, r-2, ...``."""
    ps, qs = lambda2_sequence(n, branch, params or {})
    return ps[n], qs[n]


# -- generic KWCC chains ------------------------------------------------------

def _to_tag(p: Poly, half: bool) -> Poly:
    if not half or p.var == "w":
        return p
    return Poly({2 * e: v for e, v in p.items()}, "w")


def kwcc_step(tau_prev: Poly, tau_cur: Poly, gamma, d_prev, d_cur, free=0) -> Poly | Obstruction:
    """Solve ``t' tau_prev - t tau_prev' = (2 g d_cur - 2 d_prev + 1) tau_cur**(2g)``."""
    gamma, d_prev, d_cur = Fraction(gamma), Fraction(d_prev), Fraction(d_cur)
    if gamma not in (Fraction(1, 2), Fraction(1), Fraction(2)):
        raise ValueError("gamma must be 1/2, 1 or 2")
    half = any(d.denominator != 1 for d in (d_prev, d_cur)) or "w" in (tau_prev.var, tau_cur.var)
    g, h = _to_tag(tau_prev, half), _to_tag(tau_cur, half)
    coeff = 2 * gamma * d_cur - 2 * d_prev + 1
    power = 2 * gamma
    rhs = (h ** int(power)).scale(coeff)
    return solve_first_order(g, rhs, free=free)


def kwcc_sequence(gamma0, tau1: Poly, d1, steps: int, frees: Sequence[Scalar] = ()) -> list[Poly]:
    """``tau_0 = 1, tau_1, ...`` up to ``tau_steps``; ``frees[i]`` is the constant of ``tau_{i+2}``."""
    ds, gs = kwcc_degrees(gamma0, d1, steps)
    half = any(d.denominator != 1 for d in ds)
    taus = [Poly.const(1, "w" if half else "z"), _to_tag(tau1, half)]
    for i in range(1, steps):
        free = as_scalar(frees[i - 1]) if i - 1 < len(frees) else Fraction(0)
        t = kwcc_step(taus[i - 1], taus[i], gs[i], ds[i - 1], ds[i], free)
        if isinstance(t, Obstruction):
            raise ChainTermination(i + 1, t)
        if t.lead != 1 or t.degree != (2 * ds[i + 1] if half else ds[i + 1]):
            raise ArithmeticError("KWCC step broke the degree law")
        taus.append(t)
    return taus[:steps + 1]


def _terminating_name(index: int) -> str:
    # tau_2 -> s1, tau_3 -> r1, tau_4 -> s2, ...
    return param_name("s", index // 2) if index % 2 == 0 else param_name("r", (index - 1) // 2)


def lambda2_terminating(steps: int, params: Mapping[str, object] | None = None) -> list[Poly]:
    """Terminating Lambda=2 chain with ``gamma_0 = 2`` and ``tau_1 = z**2``."""
    params = params or {}
    frees = [_param(params, _terminating_name(i + 2), 0) for i in range(steps - 1)]
    return kwcc_sequence(2, Z * Z, 2, steps, frees)


def even_bispectral_sequence(n: int, params: Mapping[str, object]) -> list[Poly]:
    """``P_0 = 1, P_1 = z**(1/2), ...`` as polynomials in ``w = z**(1/2)``."""
    frees = [_param(params, param_name("s", k), 0) for k in range(1, n)]
    return kwcc_sequence(1, W, Fraction(1, 2), n, frees)


def even_step_residual(p_next: Poly, p_prev: Poly) -> Poly:
    """``4 z**2 (p''q - 2p'q' + pq'') + pq`` for ``p = P_{n+1}``, ``q = P_n`` (tag ``w``).

    This is the zero-level chain with ``u0 = a(a-1)/z**2`` at ``a = 1/2``;
    writing ``P_{n+1} = w * r`` turns it into the generalized Tkachenko
    residual of ``(P_n, r)`` with ``a = 1/2``.
    """
    return (W ** 4 * bilinear_residual(p_next, p_prev, 1)).scale(4) + p_next * p_prev


def even_bispectral(n: int, params: Mapping[str, object] | None = None) -> Poly | Obstruction:
    """``P_n`` of the even family (tag ``w``), or the obstruction that ends the chain."""
    try:
        return even_bispectral_sequence(n, params or {})[n]
    except ChainTermination as stop:
        return stop.obstruction


# -- family specs -------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int
    params: dict = field(default_factory=dict)
    gamma0: Fraction | None = None
    d1: Fraction | None = None

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 0:
            raise ValueError("index must be nonnegative")
        for name in self.required_params():
            if name not in self.params:
                raise ValueError(f"missing parameter {name}")
        if self.family == "kwcc":
            if self.gamma0 not in (Fraction(1, 2), Fraction(1), Fraction(2)):
                raise ValueError("gamma0 must be 1/2, 1 or 2")

    def required_params(self) -> list[str]:
        n = self.n
        if self.family == "adler_moser":
            return [param_name("s", k) for k in range(1, n)]
        if self.family == "lambda2_plus":
            names = []
            for i in range(1, n + 1):
                if i > 1:
                    names.append(param_name("s", i))
                if i < n:
                    names.append(param_name("r", i))
            return names
        if self.family == "lambda2_minus":
            names = []
            for i in range(1, n + 1):
                if i > 1:
                    names.append(param_name("r", -i))
                names.append(param_name("s", -i))
            return names
        return []

    def generate(self) -> dict[str, Poly]:
        self.validate()
        p = {k: as_scalar(v) for k, v in self.params.items()}
        if self.family == "adler_moser":
            seq = adler_moser_sequence(self.n, p)
            return {f"P{self.n}": seq[self.n], f"P{self.n - 1}": seq[self.n - 1]}
        if self.family == "lambda2_plus":
            n = self.n
            has_r = param_name("r", n) in p
            ps, qs = lambda2_sequence(n, "+", p, final_p=has_r)
            out = {f"q{n}": qs[n], f"p{n - 1}": ps[n - 1]}
            if has_r:
                out[f"p{n}"] = ps[n]
            return out
        if self.family == "lambda2_minus":
            ps, qs = lambda2_sequence(self.n, "-", p)
            return {f"p-{self.n}": ps[self.n], f"q-{self.n}": qs[self.n]}
        if self.family == "even_bispectral":
            seq = even_bispectral_sequence(self.n, p)
            return {f"P{self.n}": seq[self.n], f"P{self.n - 1}": seq[self.n - 1]}
        if self.family == "lambda2_terminating":
            taus = lambda2_terminating(self.n, p)
            return {f"tau{self.n}": taus[self.n], f"tau{self.n - 1}": taus[self.n - 1]}
        d1 = self.d1 if self.d1 is not None else Fraction(1)
        if d1.denominator == 1:
            tau1 = Z ** int(d1)
        else:
            tau1 = W ** int(2 * d1)
        frees = [p.get(param_name("c", i), 0) for i in range(2, self.n + 1)]
        return {f"tau{self.n}": kwcc_sequence(self.gamma0, tau1, d1, self.n, frees)[self.n]}

    def to_json(self) -> dict:
        doc = {"family": self.family, "n": self.n,
               "params": {k: str(as_scalar(v)) for k, v in self.params.items()}}
        if self.gamma0 is not None:
            doc["gamma0"] = str(self.gamma0)
        if self.d1 is not None:
            doc["d1"] = str(self.d1)
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "FamilySpec":
        params = {k: parse_scalar(str(v)) for k, v in doc.get("params", {}).items()}
        g = Fraction(doc["gamma0"]) if "gamma0" in doc else None
        d = Fraction(doc["d1"]) if "d1" in doc else None
        return cls(doc["family"], int(doc["n"]), params, g, d)
