"""Exact linear algebra over the rationals.

Every routine clears denominators row by row and then works with Python
integers using fraction-free (Bareiss) elimination, so intermediate entries
stay integral and no floating point value is ever produced.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Matrix = list[list[Fraction]]


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def integer_rows(rows: Iterable[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators and return integer rows."""
    out = []
    for row in rows:
        row = [_as_fraction(x) for x in row]
        d = 1
        for x in row:
            if x.denominator != 1:
                d = lcm(d, x.denominator)
        out.append([int(x * d) for x in row])
    return out


def _ncols(rows, ncols):
    if ncols is not None:
        return ncols
    return len(rows[0]) if rows else 0


def _gauss_jordan(a: list[list[int]], ncols: int):
    """Fraction-free Gauss-Jordan elimination in place.

    Returns ``(pivot_columns, d)``.  Afterwards row ``i`` of the first
    ``len(pivot_columns)`` rows has the common value ``d`` at its pivot
    column and zeros in every other pivot column; the remaining rows vanish.
    """
    nrows = len(a)
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        prow = a[r]
        pv = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            row = a[i]
            f = row[c]
            if f == 0:
                if pv != prev:
                    a[i] = [(pv * x) // prev for x in row]
                continue
            a[i] = [(pv * x - f * y) // prev for x, y in zip(row, prow)]
        prev = pv
        pivots.append(c)
        r += 1
    return pivots, prev


def bareiss_rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    """Rank of a rational matrix by fraction-free forward elimination."""
    a = integer_rows(rows)
    if not a:
        return 0
    n = _ncols(a, ncols)
    nrows = len(a)
    prev = 1
    r = 0
    for c in range(n):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        prow = a[r]
        pv = prow[c]
        for i in range(r + 1, nrows):
            row = a[i]
            f = row[c]
            if f == 0:
                if pv != prev:
                    a[i] = [(pv * x) // prev for x in row]
                continue
            a[i] = [(pv * x - f * y) // prev for x, y in zip(row, prow)]
        prev = pv
        r += 1
    return r


def bareiss_det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant of a square rational matrix."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    a = []
    for row in rows:
        row = [_as_fraction(x) for x in row]
        if len(row) != n:
            raise ValueError("matrix is not square")
        d = 1
        for x in row:
            d = lcm(d, x.denominator)
        scale /= d
        a.append([int(x * d) for x in row])
    sign = 1
    prev = 1
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        pv = a[c][c]
        for i in range(c + 1, n):
            f = a[i][c]
            a[i] = [(pv * x - f * y) // prev for x, y in zip(a[i], a[c])]
        prev = pv
    return sign * scale * a[n - 1][n - 1]


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form; returns ``(rows, pivot_columns)`` as Fractions."""
    a = integer_rows(rows)
    n = _ncols(a, ncols)
    pivots, d = _gauss_jordan(a, n)
    out = [[Fraction(x, d) for x in a[i]] for i in range(len(pivots))]
    return out, pivots


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel, one primitive integer vector per free column.

    The vectors are returned as Fractions with trivial denominators.  Their
    order follows the free columns, which makes the result deterministic.
    """
    a = integer_rows(rows)
    n = _ncols(a, ncols)
    if not a:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    pivots, d = _gauss_jordan(a, n)
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = [0] * n
        v[f] = d
        for i, c in enumerate(pivots):
            v[c] = -a[i][f]
        g = 0
        for x in v:
            g = gcd(g, x)
        basis.append([Fraction(x // g) for x in v])
    return basis


def solve(a_rows: Sequence[Sequence], b_rows: Sequence[Sequence]) -> Matrix:
    """Solve ``A X = B`` for square nonsingular ``A``; ``B`` has one row per row of A."""
    n = len(a_rows)
    if n == 0:
        return []
    m = len(b_rows[0]) if b_rows else 0
    aug = [list(ar) + list(br) for ar, br in zip(a_rows, b_rows)]
    a = integer_rows(aug)
    pivots, d = _gauss_jordan(a, n)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [[Fraction(a[i][n + j], d) for j in range(m)] for i in range(n)]


def inverse(rows: Sequence[Sequence]) -> Matrix:
    """Inverse of a square nonsingular rational matrix."""
    n = len(rows)
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    return solve(rows, ident)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    """Exact product; zero entries of ``a`` and ``b`` are skipped."""
    if not a:
        return []
    ncols = len(b[0]) if b else 0
    sparse_b = [[(j, y) for j, y in enumerate(row) if y] for row in b]
    out = []
    for row in a:
        acc = [Fraction(0)] * ncols
        for i, x in enumerate(row):
            if x:
                for j, y in sparse_b[i]:
                    acc[j] += x * y
        out.append(acc)
    return out


def transpose(a: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def zeros(nrows: int, ncols: int) -> Matrix:
    return [[Fraction(0)] * ncols for _ in range(nrows)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def column_space_basis(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal independent subset of ``vectors``, chosen greedily."""
    if not vectors:
        return []
    a = integer_rows(transpose(vectors))
    pivots, _ = _gauss_jordan(a, len(vectors))
    return pivots
