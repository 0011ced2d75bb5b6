"""Polynomial tau-functions in hierarchy times.

Adler-Moser polynomials as Wronskians of elementary Schur polynomials (KdV
times), Sawada-Kotera tau-functions as Pfaffians of ``chi`` bilinears, the
maps from times to the chain parameters ``s_i, r_i``, and intertwining
operators read off from the shifted-times (Sato) formula.

Times are numeric except ``t_1``, which is the variable ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .chains import degree_law, param_name
from .diffop import DiffOp, compose, intertwine_check
from .exact_core import Poly, RationalFunction, Scalar, as_scalar, fraction_free_pfaffian
from .functions import polynomial_wronskian

Z = Poly.gen("z")

# -- times --------------------------------------------------------------------


def _sk_allowed(i: int) -> bool:
    return i % 2 == 1 and i % 3 != 0


@dataclass(frozen=True)
class TimesAssignment:
    """Numeric times ``t_i`` (``i >= 2``) for one hierarchy.

    ``hierarchy`` is ``"kdv"`` (even times vanish), ``"sk"`` (times with index
    divisible by 2 or 3 vanish) or ``"kp"`` (no constraint).
    """

    hierarchy: str = "kdv"
    values: Mapping[int, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        if self.hierarchy not in ("kdv", "sk", "kp"):
            raise ValueError(f"unknown hierarchy {self.hierarchy!r}")
        clean = {}
        for i, v in dict(self.values).items():
            i = int(i)
            if i < 2:
                raise ValueError("t_1 is the variable z and cannot be assigned")
            v = as_scalar(v)
            if v and not self.allows(i):
                raise ValueError(f"time t_{i} must vanish in the {self.hierarchy} hierarchy")
            if v:
                clean[i] = v
        object.__setattr__(self, "values", clean)

    def allows(self, i: int) -> bool:
        if self.hierarchy == "kdv":
            return i % 2 == 1
        if self.hierarchy == "sk":
            return _sk_allowed(i)
        return True

    def __getitem__(self, i: int) -> Scalar:
        return self.values.get(i, Fraction(0))


def _as_times(t, hierarchy: str) -> dict[int, Scalar]:
    if t is None:
        return {}
    if isinstance(t, TimesAssignment):
        return dict(t.values)
    return dict(TimesAssignment(hierarchy, t).values)


def schur_values(n: int, xs: Mapping[int, Scalar]) -> Scalar:
    """``S_n(x_1, x_2, ...)`` for numeric arguments."""
    s = [Fraction(1)]
    for k in range(1, n + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            x = xs.get(i, 0)
            if x:
                acc = acc + i * x * s[k - i]
        s.append(acc / k)
    return s[n]


def schur_polys(n: int, times: Mapping[int, Scalar]) -> list[Poly]:
    """``S_0..S_n`` as polynomials in ``z``; ``times[1]``, if present, is added to ``z``."""
    t1 = Z + as_scalar(times.get(1, 0))
    s = [Poly.const(1)]
    for k in range(1, n + 1):
        acc = t1 * s[k - 1]
        for i in range(2, k + 1):
            x = times.get(i, 0)
            if x:
                acc = acc + s[k - i].scale(i * x)
        s.append(acc / k)
    return s


def schur(n: int, t=None) -> Poly:
    """Elementary Schur polynomial ``S_n`` with ``t_1 = z``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    times = _as_times(t, "kp")
    return schur_polys(n, times)[n]


# -- chi bilinears and Pfaffians ------------------------------------------------

def _chi(a: int, b: int, s: list[Poly]) -> Poly:
    if a == b:
        return Poly(None)
    if a < b:
        return -_chi(b, a, s)
    out = (s[a] * s[b]) / 2
    for j in range(1, b + 1):
        term = s[a + j] * s[b - j]
        out = out - term if j % 2 else out + term
    return out


def chi(a: int, b: int, t=None) -> Poly:
    """``chi_{a,b} = S_a S_b / 2 + sum_{j=1}^b (-1)^j S_{a+j} S_{b-j}``, antisymmetric."""
    if a < 0 or b < 0:
        raise ValueError("indices must be nonnegative")
    times = _as_times(t, "kp")
    return _chi(a, b, schur_polys(a + b, times))


def mu_sequence(case: int, m: int) -> list[int]:
    """Index sequence of length ``2m`` for the four Pfaffian cases."""
    if m < 1:
        raise ValueError("m must be positive")
    if case == 1:
        return list(range(6 * m - 2, 0, -3))
    if case == 2:
        return list(range(6 * m - 5, 0, -3)) + [0]
    if case == 3:
        return list(range(6 * m - 1, 1, -3))
    if case == 4:
        return list(range(6 * m - 4, 1, -3)) + [0]
    raise ValueError("case must be 1, 2, 3 or 4")


def case_of(n: int) -> tuple[int, int]:
    """``(case, m)`` selecting ``q_n`` (``n != 0``)."""
    if n > 0:
        return (1, n // 2) if n % 2 == 0 else (2, (n + 1) // 2)
    if n < 0:
        k = -n
        return (3, k // 2) if k % 2 == 0 else (4, (k + 1) // 2)
    raise ValueError("n must be nonzero")


def _c_top(case: int, m: int) -> int:
    mu = mu_sequence(case, m)
    return mu[0] + mu[1]


def substituted_c(case: int, m: int) -> list[int]:
    """Indices of ``c`` computed by the recursion (``c_2 = 0`` in cases 1 and 2)."""
    if case == 1:
        return [2] + list(range(8, 12 * m - 9, 6))
    if case == 2:
        return [2] + list(range(8, 12 * m - 15, 6))
    if case == 3:
        return list(range(4, 12 * m - 7, 6))
    if case == 4:
        return list(range(4, 12 * m - 13, 6))
    raise ValueError("case must be 1, 2, 3 or 4")


def free_c(case: int, m: int) -> list[int]:
    """Indices of the free ``c`` parameters of ``q_n``."""
    if case == 1:
        return list(range(4, 6 * m - 1, 6))
    if case == 2:
        return list(range(4, 6 * m - 7, 6))
    if case in (3, 4):
        return list(range(2, 6 * m - 3, 6))
    raise ValueError("case must be 1, 2, 3 or 4")


def c_fill(case: int, m: int, free: Mapping[int, Scalar] | None = None) -> dict[int, Scalar]:
    """Full ``c`` sequence: free entries, recursive substitutions, zeros elsewhere.

    Odd entries, and even entries that are neither free nor substituted,
    are zero.  Substituted entries follow
    ``c_{2j} = -S_j(2c_2, ..., 2c_{2j-2}, 0) / 2``.
    """
    free = {int(k): as_scalar(v) for k, v in (free or {}).items()}
    needed = free_c(case, m)
    missing = [i for i in needed if i not in free]
    if missing:
        raise ValueError("missing free parameter(s) " + ", ".join(f"c{i}" for i in missing))
    extra = [i for i in free if i not in needed]
    if extra:
        raise ValueError("not a free parameter here: " + ", ".join(f"c{i}" for i in extra))
    subs = set(substituted_c(case, m))
    top = _c_top(case, m)
    c: dict[int, Scalar] = {}
    for idx in range(2, top + 1, 2):
        j = idx // 2
        if idx in free:
            c[idx] = free[idx]
        elif idx in subs:
            if j == 1:
                c[idx] = Fraction(0)
            else:
                args = {i: 2 * c.get(2 * i, 0) for i in range(1, j)}
                c[idx] = -schur_values(j, args) / 2
        else:
            c[idx] = Fraction(0)
    return {k: v for k, v in c.items() if v}


def chi_matrix(mu: list[int], times: Mapping[int, Scalar]) -> list[list[Poly]]:
    """Antisymmetric matrix ``chi_{mu_i, mu_j}`` at the given (full) times."""
    s = schur_polys(mu[0] + mu[1] if len(mu) > 1 else mu[0], times)
    return [[_chi(a, b, s) for b in mu] for a in mu]


def _sk_times(n: int, t, c) -> tuple[list[int], dict[int, Scalar]]:
    case, m = case_of(n)
    mu = mu_sequence(case, m)
    times = _as_times(t, "sk")
    cs = c_fill(case, m, c)
    full = dict(times)
    for k, v in cs.items():
        full[k] = full.get(k, 0) + v
    return mu, full


def _pfaffian_tau(mu: list[int], full: Mapping[int, Scalar]) -> Poly:
    return fraction_free_pfaffian(chi_matrix(mu, full))


def sk_tau(n: int, t=None, c: Mapping[int, Scalar] | None = None) -> Poly:
    """Monic Sawada-Kotera tau-function ``q_n`` at times ``t`` and free constants ``c``.

    ``c`` maps indices to values, e.g. ``{4: c4}`` for ``q_2`` or ``{2: c2}``
    for ``q_{-1}``.
    """
    if n == 0:
        return Poly.const(1)
    mu, full = _sk_times(n, t, c)
    tau = _pfaffian_tau(mu, full)
    _, deg = degree_law("lambda2", n)
    if tau.is_zero or tau.degree != deg:
        raise ArithmeticError(f"Pfaffian has degree {tau.degree}, expected {deg}")
    return tau.monic()


def am_normalization(n: int) -> int:
    """``3**(n-1) * 5**(n-2) * ... * (2n-1)``."""
    out = 1
    for k in range(1, n):
        out *= (2 * k + 1) ** (n - k)
    return out


def _am_raw(n: int, times: Mapping[int, Scalar]) -> Poly:
    if n == 0:
        return Poly.const(1)
    s = schur_polys(2 * n - 1, times)
    return polynomial_wronskian([s[2 * k - 1] for k in range(1, n + 1)]) * am_normalization(n)


def am_in_times(n: int, t=None) -> Poly:
    """Adler-Moser ``P_n`` as a function of the KdV times ``t_3, t_5, ...``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    p = _am_raw(n, _as_times(t, "kdv"))
    if p.lead != 1:
        raise ArithmeticError("normalized Wronskian is not monic")
    return p


# -- chain parameters -----------------------------------------------------------

def extract_chain_params(poly: Poly, family: str, index: int) -> dict[str, Scalar]:
    """Read the normal-form constant of one chain member.

    ``family`` is ``"adler_moser"`` (``P_index`` carries ``s_{index-1}`` at
    ``z**deg P_{index-2}``), ``"lambda2_q"`` (``q_index`` carries ``s_index``
    at ``z**deg q_{index-1}``) or ``"lambda2_p"`` (``p_index`` carries
    ``r_index`` at ``z**deg p_{index-1}``).  Negative indices address the
    negative branch.
    """
    if poly.lead != 1:
        raise ValueError("chain members are monic")
    step = 1 if index > 0 else -1
    if family == "adler_moser":
        if index < 2:
            raise ValueError("P_0 and P_1 carry no constant")
        want, at = degree_law("adler_moser", index), degree_law("adler_moser", index - 2)
        name = param_name("s", index - 1)
    elif family in ("lambda2_q", "lambda2_p"):
        if index == 0:
            raise ValueError("index must be nonzero")
        slot = 1 if family == "lambda2_q" else 0
        want = degree_law("lambda2", index)[slot]
        at = degree_law("lambda2", index - step)[slot]
        name = param_name("s" if slot else "r", index)
    else:
        raise ValueError(f"unknown family {family!r}")
    if poly.degree != want:
        raise ValueError(f"degree {poly.degree} does not match the family law ({want})")
    return {name: poly.coeff(int(at))}


def _lambda2_p_from_q(q_prev: Poly, q_next: Poly, i: int, branch: int) -> Poly:
    """``p`` linking ``q_i -> q_{i+-1}`` from ``q_next' q_prev - q_next q_prev' = c p``."""
    l_i, m_i = degree_law("lambda2", i)
    if branch > 0:
        coeff = l_i - 2 * m_i + 1
    else:
        l_d, _ = degree_law("lambda2", i - 1)
        coeff = l_d - 2 * m_i + 1
    w = q_next.diff() * q_prev - q_next * q_prev.diff()
    return w / coeff


def am_params_from_times(n: int, t=None) -> dict[str, Scalar]:
    """``s_1..s_{n-1}`` of ``P_n`` from the KdV times."""
    out: dict[str, Scalar] = {}
    for k in range(2, n + 1):
        out.update(extract_chain_params(am_in_times(k, t), "adler_moser", k))
    return out


def sk_params_from_times(n: int, t=None, c: Mapping[int, Scalar] | None = None) -> dict[str, Scalar]:
    """Chain constants ``s_i, r_i`` reproducing ``q_n`` from the hierarchy data.

    Uses the tau-functions of lower index at the same times and the
    ``p`` they determine.  Constants of ``q_n`` alone are returned, so the
    map is only a re-parametrization when it is injective.
    """
    if n == 0:
        return {}
    step = 1 if n > 0 else -1
    c = dict(c or {})
    qs = [Poly.const(1)]
    for k in range(step, n + step, step):
        ck, mk = case_of(k)
        keys = free_c(ck, mk)
        qs.append(sk_tau(k, t, {i: c.get(i, 0) for i in keys}))
    out: dict[str, Scalar] = {}
    for j in range(1, abs(n) + 1):
        out.update(extract_chain_params(qs[j], "lambda2_q", step * j))
        if step > 0 and j < n:
            p = _lambda2_p_from_q(qs[j], qs[j + 1], j, 1)
            out.update(extract_chain_params(p, "lambda2_p", j))
        elif step < 0:
            p = _lambda2_p_from_q(qs[j - 1], qs[j], 1 - j, -1)
            out.update(extract_chain_params(p, "lambda2_p", -j))
    return out


# -- intertwining operators ------------------------------------------------------

def _tau_function(family: str, n: int, t, c):
    """Return (tau at the given times, callable for tau at shifted times, shift weights)."""
    if family == "kdv":
        times = _as_times(t, "kdv")
        top = 2 * n - 1

        def at(extra: Mapping[int, Scalar]) -> Poly:
            full = dict(times)
            for k, v in extra.items():
                full[k] = full.get(k, 0) + v
            return _am_raw(n, full)

        weights = {j: Fraction(1) for j in range(1, top + 1, 2)}
        return at, weights
    if family == "sk":
        mu, full0 = _sk_times(n, t, c)
        top = mu[0] + mu[1]

        def at(extra: Mapping[int, Scalar]) -> Poly:
            full = dict(full0)
            for k, v in extra.items():
                full[k] = full.get(k, 0) + v
            return _pfaffian_tau(mu, full)

        weights = {j: Fraction(2) for j in range(1, top + 1) if _sk_allowed(j)}
        return at, weights
    raise ValueError("family must be 'kdv' or 'sk'")


def intertwiner_order(family: str, n: int) -> int:
    if family == "kdv":
        return n
    if n > 0:
        return 3 * n - 2
    return -3 * n - 1


def _interpolate(values: list[Poly], nodes: list[Fraction]) -> list[Poly]:
    """Coefficients in ``y`` of the polynomial taking ``values`` at ``nodes`` (Newton form)."""
    table = list(values)
    coeffs = [table[0]]
    for level in range(1, len(nodes)):
        table = [(table[i + 1] - table[i]) / (nodes[i + level] - nodes[i]) for i in range(len(table) - 1)]
        coeffs.append(table[0])
    acc: list[Poly] = [coeffs[-1]]
    for i in range(len(coeffs) - 2, -1, -1):
        # acc * (y - nodes[i]) + coeffs[i]
        shifted = [Poly(None)] + acc
        for k, a in enumerate(acc):
            shifted[k] = shifted[k] - a.scale(nodes[i])
        shifted[0] = shifted[0] + coeffs[i]
        acc = shifted
    return acc


def sato_intertwiner(family: str, n: int, t=None, c: Mapping[int, Scalar] | None = None,
                     check: bool = True) -> DiffOp:
    """Intertwining operator ``T_n`` with ``L_n T_n = T_n L_0``.

    ``tau(t - shifts(1/k)) / tau(t) * k**order`` is expanded in ``k`` (every
    negative power must cancel) and ``k`` is replaced by ``d/dz`` to the
    right of the coefficients.  KdV: ``L_n = d^2 + 2 (log tau)''``;
    SK: ``L_n = d^3 + 6 (log tau)'' d``.
    """
    if n == 0:
        return DiffOp.identity()
    if family == "kdv" and n < 0:
        raise ValueError("KdV intertwiners need n > 0")
    at, weights = _tau_function(family, n, t, c)
    tau = at({})
    deg = tau.degree
    order = intertwiner_order(family, n)
    nodes = [Fraction(i) for i in range(deg + 2)]
    samples = []
    for y in nodes:
        extra = {j: -w * y ** j / j for j, w in weights.items()}
        samples.append(at(extra))
    coeffs = _interpolate(samples, nodes)
    while coeffs and coeffs[-1].is_zero:
        coeffs.pop()
    if len(coeffs) - 1 > order:
        raise ArithmeticError("negative powers of k do not cancel")
    op = DiffOp({order - i: RationalFunction(a, tau) for i, a in enumerate(coeffs) if a}, "z")
    if check:
        l0, ln = lax_pair(family, tau)
        if not intertwine_check(ln, op, l0):
            raise AssertionError("constructed operator does not intertwine")
    return op


def lax_pair(family: str, tau: Poly) -> tuple[DiffOp, DiffOp]:
    """``(L_0, L_n)`` for the hierarchy with tau-function ``tau``."""
    second = RationalFunction(tau.diff(), tau).diff()
    if family == "kdv":
        return DiffOp({2: 1}), DiffOp({2: 1, 0: second * 2})
    return DiffOp({3: 1}), DiffOp({3: 1, 1: second * 6})


def chain_of_intertwiners(ops: list[DiffOp]) -> DiffOp:
    """Composition ``ops[-1] ... ops[0]``."""
    out = DiffOp.identity()
    for op in ops:
        out = compose(op, out)
    return out


__all__ = [
    "TimesAssignment", "am_in_times", "am_normalization", "am_params_from_times", "c_fill",
    "case_of", "chain_of_intertwiners", "chi", "chi_matrix", "extract_chain_params", "free_c",
    "intertwiner_order", "lax_pair", "mu_sequence", "sato_intertwiner", "schur", "schur_polys",
    "schur_values", "sk_params_from_times", "sk_tau", "substituted_c",
]
