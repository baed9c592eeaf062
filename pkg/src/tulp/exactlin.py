"""Exact linear algebra over integers and fractions.

Small dense helpers used by the certification paths: integer determinants
via Bareiss elimination (no intermediate fractions, arbitrary precision),
and fraction-based solves, inverses and rank computations.  Everything here
is desk scale; no attempt is made to be fast beyond that.
"""

from __future__ import annotations

import math
from fractions import Fraction

from tulp.errors import SingularMatrixError


def det_int(mat: list[list[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    n = len(mat)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = (pivot * row_i[j] - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def det_fraction(mat) -> Fraction:
    """Exact determinant of a square matrix with Fraction entries."""
    scaled, denom = _clear_denominators(mat)
    n = len(scaled)
    return Fraction(det_int(scaled), denom**n) if n else Fraction(1)


def _clear_denominators(mat):
    """Scale a fraction matrix to integers; returns (int matrix, multiplier)."""
    denom = math.lcm(*(Fraction(v).denominator for row in mat for v in row)) if mat else 1
    scaled = [[int(Fraction(v) * denom) for v in row] for row in mat]
    return scaled, denom


def solve_square(mat, rhs) -> list[Fraction]:
    """Solve M u = rhs exactly; raises SingularMatrixError if singular."""
    n = len(mat)
    a = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def invert(mat) -> list[list[Fraction]]:
    """Exact inverse of a square fraction matrix (Gauss-Jordan)."""
    n = len(mat)
    a = [[Fraction(v) for v in row] +
         [Fraction(1 if j == i else 0) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def independent_rows(mat) -> list[int]:
    """Indices of a lexicographically-first maximal independent row set."""
    basis = []  # reduced, nonzero rows
    kept = []
    for idx, row in enumerate(mat):
        vec = [Fraction(v) for v in row]
        for bvec in basis:
            lead = next((j for j, v in enumerate(bvec) if v != 0), None)
            if lead is not None and vec[lead] != 0:
                f = vec[lead] / bvec[lead]
                vec = [x - f * y for x, y in zip(vec, bvec)]
        if any(v != 0 for v in vec):
            basis.append(vec)
            kept.append(idx)
    return kept


def rank(mat) -> int:
    return len(independent_rows(mat))
