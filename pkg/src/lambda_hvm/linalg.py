"""Dense exact matrices over cyclotomic fields, and exact rank / solve.

Matrices are small (Hilbert-space dimension d^n at desk scale), so plain
Gaussian elimination over the field is used throughout.  A rational fast
path kicks in when every entry is order-1, which covers all qubit data.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import CycNumber, rational, zeta

__all__ = ["CycMatrix", "exact_rank", "exact_solve", "kernel_vector"]


def _as_cyc(x) -> CycNumber:
    if isinstance(x, CycNumber):
        return x
    return CycNumber.from_rational(Fraction(x))


class CycMatrix:
    """Immutable dense matrix with CycNumber entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence]):
        self.data = tuple(tuple(_as_cyc(x) for x in row) for row in data)
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.rows else 0
        if any(len(r) != self.cols for r in self.data):
            raise ValueError("ragged rows")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int) -> "CycMatrix":
        z = CycNumber.zero()
        return CycMatrix([[z] * cols for _ in range(rows)])

    @staticmethod
    def identity(n: int, scale=1) -> "CycMatrix":
        s = _as_cyc(scale)
        z = CycNumber.zero()
        return CycMatrix([[s if i == j else z for j in range(n)] for i in range(n)])

    # -- basic queries ---------------------------------------------------------

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(a == b for ra, rb in zip(self.data, other.data) for a, b in zip(ra, rb))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.data for x in row)

    def is_hermitian(self) -> bool:
        return self == self.dagger()

    # -- algebra ----------------------------------------------------------------

    def __add__(self, other: "CycMatrix") -> "CycMatrix":
        return CycMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other: "CycMatrix") -> "CycMatrix":
        return CycMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __neg__(self) -> "CycMatrix":
        return CycMatrix([[-a for a in row] for row in self.data])

    def scale(self, s) -> "CycMatrix":
        s = _as_cyc(s)
        return CycMatrix([[a * s for a in row] for row in self.data])

    def __matmul__(self, other: "CycMatrix") -> "CycMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        bt = list(zip(*other.data))
        out = []
        zero = CycNumber.zero()
        for row in self.data:
            new_row = []
            for col in bt:
                acc = zero
                for a, b in zip(row, col):
                    if not (a.is_zero() or b.is_zero()):
                        acc = acc + a * b
                new_row.append(acc)
            out.append(new_row)
        return CycMatrix(out)

    def dagger(self) -> "CycMatrix":
        return CycMatrix([[self.data[i][j].conjugate() for i in range(self.rows)]
                          for j in range(self.cols)])

    def trace(self) -> CycNumber:
        acc = CycNumber.zero()
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.data[i][i]
        return acc

    def kron(self, other: "CycMatrix") -> "CycMatrix":
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    a = self.data[i][j]
                    row.extend(a * b for b in other.data[k])
                out.append(row)
        return CycMatrix(out)

    def power(self, k: int) -> "CycMatrix":
        if self.rows != self.cols:
            raise ValueError("square matrices only")
        result = CycMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    # -- numeric view -------------------------------------------------------------

    def to_complex(self) -> np.ndarray:
        return np.array([[x.approx() for x in row] for row in self.data], dtype=complex)

    # -- exact text form ------------------------------------------------------

    def serialize_rows(self) -> list[list[str]]:
        return [[x.serialize() for x in row] for row in self.data]

    @staticmethod
    def from_serialized(rows: Sequence[Sequence[str]]) -> "CycMatrix":
        return CycMatrix([[CycNumber.parse(x) for x in row] for row in rows])

    def __repr__(self):
        return f"CycMatrix({self.rows}x{self.cols})"


# ---------------------------------------------------------------------------
# elimination


def _all_rational(rows: Iterable[Sequence[CycNumber]]) -> bool:
    return all(x.is_rational() for row in rows for x in row)


def _rank_rational(rows: list[list[Fraction]]) -> int:
    m = [row[:] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(nrows):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def exact_rank(matrix) -> int:
    """Rank over the cyclotomic field (or Q), computed exactly."""
    if isinstance(matrix, CycMatrix):
        rows = [list(r) for r in matrix.data]
    else:
        rows = [[_as_cyc(x) for x in row] for row in matrix]
    if not rows or not rows[0]:
        return 0
    if _all_rational(rows):
        return _rank_rational([[x.as_fraction() for x in row] for row in rows])
    nrows, ncols = len(rows), len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if not rows[r][col].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(rank + 1, nrows):
            if not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def exact_solve(a_rows: Sequence[Sequence], rhs: Sequence):
    """Solve A x = b exactly over the field.

    Returns the unique solution as a list of CycNumber, or None when the
    system is inconsistent or underdetermined (no unique solution).
    """
    rows = [[_as_cyc(x) for x in row] + [_as_cyc(b)] for row, b in zip(a_rows, rhs)]
    if not rows:
        return None
    ncols = len(rows[0]) - 1
    nrows = len(rows)
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if not rows[r][col].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(nrows):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    # inconsistent?
    for r in range(rank, nrows):
        if not rows[r][ncols].is_zero():
            return None
    if rank < ncols:
        return None  # underdetermined
    sol = [CycNumber.zero()] * ncols
    for r, col in enumerate(pivots):
        sol[col] = rows[r][ncols]
    return sol


def kernel_vector(a_rows: Sequence[Sequence]):
    """A nonzero kernel vector of A (exact), or None if A has full column rank."""
    rows = [[_as_cyc(x) for x in row] for row in a_rows]
    if not rows:
        return None
    ncols = len(rows[0])
    nrows = len(rows)
    pivots: dict[int, int] = {}
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if not rows[r][col].is_zero()), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(nrows):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots[col] = rank
        rank += 1
        if rank == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    fcol = free[0]
    vec = [CycNumber.zero()] * ncols
    vec[fcol] = CycNumber.one()
    for col, r in pivots.items():
        vec[col] = -rows[r][fcol]
    return vec
