"""Exact linear algebra: Bareiss determinants, Pfaffians and linear solves.

Matrix entries may be exact scalars or ``Poly`` values sharing one tag.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import Poly, TagMismatch
from .scalar import Scalar, as_scalar

Matrix = Sequence[Sequence[object]]


def _exact_div(a, b):
    if isinstance(a, Poly):
        return a.exact_div(b)
    return a / b


def _is_zero(a) -> bool:
    return a.is_zero if isinstance(a, Poly) else a == 0


def _zero_like(m: Matrix):
    for row in m:
        for a in row:
            if isinstance(a, Poly):
                return Poly(None, a.var)
    return Fraction(0)


def _one_like(m: Matrix):
    for row in m:
        for a in row:
            if isinstance(a, Poly):
                return Poly.const(1, a.var)
    return Fraction(1)


def _check_square(m: Matrix) -> int:
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix is not square")
    tags = {a.var for row in m for a in row if isinstance(a, Poly)}
    if len(tags) > 1:
        raise TagMismatch(f"mixed variable tags {sorted(tags)}")
    return n


def fraction_free_det(m: Matrix):
    """Determinant by Bareiss elimination; every division is exact."""
    n = _check_square(m)
    if n == 0:
        return Fraction(1)
    a = [list(row) for row in m]
    sign = 1
    prev = _one_like(m)
    for k in range(n - 1):
        if _is_zero(a[k][k]):
            for r in range(k + 1, n):
                if not _is_zero(a[r][k]):
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return _zero_like(m)
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = _exact_div(row_i[j] * piv - aik * row_k[j], prev)
        prev = piv
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def cofactor_det(m: Matrix):
    """Laplace expansion along the first row, memoized on column subsets.

    Uses only ring operations; serves as an independent check of
    :func:`fraction_free_det`.
    """
    n = _check_square(m)
    zero = _zero_like(m)
    memo: dict[int, object] = {}

    def minor(row: int, cols: int):
        if row == n:
            return _one_like(m)
        key = cols
        if key in memo:
            return memo[key]
        total = zero
        sign = 1
        for j in range(n):
            if cols >> j & 1:
                entry = m[row][j]
                if not _is_zero(entry):
                    term = entry * minor(row + 1, cols & ~(1 << j))
                    total = total + term if sign > 0 else total - term
                sign = -sign
        memo[key] = total
        return total

    return minor(0, (1 << n) - 1)


def fraction_free_pfaffian(m: Matrix):
    """Pfaffian of an antisymmetric matrix by division-free minor expansion.

    Expansion along the first remaining index with memoization over index
    subsets, so the cost is ``O(2**n * n)`` ring operations.
    """
    n = _check_square(m)
    if n % 2:
        raise ValueError("Pfaffian needs an even dimension")
    for i in range(n):
        if not _is_zero(m[i][i]):
            raise ValueError("matrix is not antisymmetric (nonzero diagonal)")
        for j in range(i + 1, n):
            if m[i][j] != -m[j][i]:
                raise ValueError(f"matrix is not antisymmetric at ({i}, {j})")
    zero = _zero_like(m)
    one = _one_like(m)
    memo: dict[int, object] = {}

    def pf(mask: int):
        if mask == 0:
            return one
        if mask in memo:
            return memo[mask]
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = zero
        sign = 1
        for j in range(i + 1, n):
            if rest >> j & 1:
                entry = m[i][j]
                if not _is_zero(entry):
                    term = entry * pf(rest & ~(1 << j))
                    total = total + term if sign > 0 else total - term
                sign = -sign
        memo[mask] = total
        return total

    return pf((1 << n) - 1)


@dataclass(frozen=True)
class LinearSolution:
    """``x = particular + sum_f t_f * basis[f]`` for free parameters ``t_f``."""

    particular: list
    free: list[int] = field(default_factory=list)
    basis: dict[int, list] = field(default_factory=dict)

    @property
    def unique(self) -> bool:
        return not self.free

    def at(self, values: dict[int, Scalar]) -> list:
        """Solution with the free variables set as given (missing ones are 0)."""
        x = list(self.particular)
        for f in self.free:
            t = as_scalar(values.get(f, 0))
            if t:
                x = [xi + t * bi for xi, bi in zip(x, self.basis[f])]
        return x


@dataclass(frozen=True)
class Inconsistency:
    """Certificate ``y`` with ``y A = 0`` and ``y b = residual != 0``."""

    multipliers: list
    residual: Scalar
    rows: list[int]

    def __bool__(self) -> bool:
        return False


def solve_linear(a: Matrix, b: Sequence) -> LinearSolution | Inconsistency:
    """Exact Gauss-Jordan solve of ``A x = b`` over rationals or Gaussian rationals."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if len(b) != rows:
        raise ValueError("right-hand side length does not match the matrix")
    # augmented with the identity to keep track of row combinations
    aug = []
    for i in range(rows):
        ident = [Fraction(0)] * rows
        ident[i] = Fraction(1)
        aug.append([as_scalar(x) for x in a[i]] + [as_scalar(b[i])] + ident)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        pr = aug[r]
        support = [j for j, y in enumerate(pr) if y]
        for i in range(rows):
            row = aug[i]
            if i != r and row[c] != 0:
                f = row[c]
                for j in support:
                    row[j] = row[j] - f * pr[j]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if aug[i][cols] != 0:
            y = aug[i][cols + 1:]
            return Inconsistency(y, aug[i][cols], [k for k, v in enumerate(y) if v != 0])
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][cols]
    free = [c for c in range(cols) if c not in pivots]
    basis: dict[int, list] = {}
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -aug[i][f]
        basis[f] = v
    return LinearSolution(x, free, basis)
