"""Exact rational matrices: fraction-free rank, determinant, small solvers.

Rank and determinant run Bareiss fraction-free elimination on an integer
rescaling of the matrix, so intermediate values stay integral and exact.
A word-size prime-field mirror (``rank_mod``) is available as a fast
pre-filter; modular rank can only underestimate the rational rank, so every
certificate-bearing result is re-established over the rationals.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Sequence

from .errors import ToolkitError

#: Default word-size prime for the modular pre-filter (override with
#: the NODAL_DEGEN_PRIME environment variable).
DEFAULT_PRIME = 2**31 - 1


def prefilter_prime() -> int:
    """The prime used by the modular mirror, honoring NODAL_DEGEN_PRIME."""
    raw = os.environ.get("NODAL_DEGEN_PRIME")
    if raw is None:
        return DEFAULT_PRIME
    p = int(raw)
    if p < 2:
        raise ValueError(f"NODAL_DEGEN_PRIME must be a prime >= 2, got {p}")
    return p


class ModularUnusable(ToolkitError, ValueError):
    """A denominator vanishes mod p, so the modular mirror cannot be used."""


@dataclass(frozen=True)
class RatMatrix:
    """Dense exact matrix, row-major entries."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows*cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat: list[Fraction] = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            flat.extend(Fraction(x) for x in row)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.from_rows(
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        )

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def _int_rows(self) -> tuple[list[list[int]], Fraction]:
        """Integer rescaling (row by row) and the product of the row scalings."""
        out: list[list[int]] = []
        scale = Fraction(1)
        for i in range(self.rows):
            row = self.row(i)
            mult = lcm(*(x.denominator for x in row)) if row else 1
            scale *= mult
            out.append([int(x * mult) for x in row])
        return out, scale

    def rank(self) -> int:
        """Exact rank via fraction-free (Bareiss) elimination."""
        m, _ = self._int_rows()
        return _bareiss_rank(m, self.rows, self.cols)

    def det(self) -> Fraction:
        """Exact determinant (square matrices only)."""
        if self.rows != self.cols:
            raise ValueError("determinant requires a square matrix")
        if self.rows == 0:
            return Fraction(1)
        m, scale = self._int_rows()
        return Fraction(_bareiss_det(m, self.rows)) / scale

    def rank_mod(self, p: int | None = None) -> int:
        """Rank over the prime field F_p; raises ModularUnusable on bad denominators.

        Always <= the rational rank, which makes full modular rank a sound
        shortcut but never a substitute for the rational certificate.
        """
        p = p or prefilter_prime()
        m: list[list[int]] = []
        for i in range(self.rows):
            row = []
            for x in self.row(i):
                den = x.denominator % p
                if den == 0:
                    raise ModularUnusable(f"denominator divisible by {p}")
                row.append((x.numerator % p) * pow(den, -1, p) % p)
            m.append(row)
        rank = 0
        for col in range(self.cols):
            pivot = next((r for r in range(rank, self.rows) if m[r][col]), None)
            if pivot is None:
                continue
            m[rank], m[pivot] = m[pivot], m[rank]
            inv = pow(m[rank][col], -1, p)
            for r in range(rank + 1, self.rows):
                if m[r][col]:
                    factor = m[r][col] * inv % p
                    m[r] = [(a - factor * b) % p for a, b in zip(m[r], m[rank])]
            rank += 1
            if rank == self.rows:
                break
        return rank


def _bareiss_rank(m: list[list[int]], nrows: int, ncols: int) -> int:
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if m[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        piv = m[rank][col]
        row_p = m[rank]
        # The pivot rescaling applies to every lower row, zero head or not,
        # so that later exact divisions by `prev` stay integral.
        for r in range(rank + 1, nrows):
            head = m[r][col]
            row_r = m[r]
            for c in range(col, ncols):
                row_r[c] = (row_r[c] * piv - head * row_p[c]) // prev
        prev = piv
        rank += 1
        if rank == nrows:
            break
    return rank


def _bareiss_det(m: list[list[int]], n: int) -> int:
    sign = 1
    prev = 1
    for k in range(n - 1):
        pivot = next((r for r in range(k, n) if m[r][k]), None)
        if pivot is None:
            return 0
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        piv = m[k][k]
        for r in range(k + 1, n):
            head = m[r][k]
            row_r = m[r]
            row_k = m[k]
            for c in range(k, n):
                row_r[c] = (row_r[c] * piv - head * row_k[c]) // prev
        prev = piv
    return sign * m[n - 1][n - 1]


def minor_rank(matrix: RatMatrix) -> int:
    """Exhaustive minor-search rank oracle (exponential; small matrices only).

    The rank is the largest k such that some k-by-k minor has nonzero
    determinant.  Used as an independent check of :meth:`RatMatrix.rank`.
    """
    rows = matrix.to_rows()
    for k in range(min(matrix.rows, matrix.cols), 0, -1):
        for ri in combinations(range(matrix.rows), k):
            for ci in combinations(range(matrix.cols), k):
                sub = RatMatrix.from_rows([[rows[i][j] for j in ci] for i in ri])
                if sub.det() != 0:
                    return k
    return 0


def solve_unique(matrix: RatMatrix, rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve A x = b for the unique solution; raises if none or many exist."""
    if len(rhs) != matrix.rows:
        raise ValueError("rhs length must equal the number of rows")
    n = matrix.cols
    aug = [list(matrix.row(i)) + [Fraction(rhs[i])] for i in range(matrix.rows)]
    pivots: list[int] = []
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, len(aug)) if aug[r][col]), None)
        if pivot is None:
            continue
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = aug[row][col]
        aug[row] = [x / inv for x in aug[row]]
        for r in range(len(aug)):
            if r != row and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    for r in range(row, len(aug)):
        if aug[r][n]:
            raise ValueError("inconsistent linear system")
    if len(pivots) < n:
        raise ValueError("underdetermined linear system")
    sol = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = aug[r][n]
    return sol


def content(values: Sequence[int]) -> int:
    """gcd of a sequence of integers (0 for the empty sequence)."""
    g = 0
    for v in values:
        g = gcd(g, v)
        if g == 1:
            return 1
    return g
