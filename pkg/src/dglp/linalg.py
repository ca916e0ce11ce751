"""Exact rational linear algebra: dense matrices over Fraction.

Everything downstream (differentials, lifting, homotopy solving) reduces to
kernel / image / solve questions over the rationals, so the rules used for
"arbitrary" choices are fixed here once: solve zeroes the free variables and
complements are spanned by non-pivot coordinate vectors.  That keeps every
construction in the package deterministic and golden-testable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vector = list[Fraction]


def frac(x) -> Fraction:
    """Coerce ints, strings like '2/3' and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class Matrix:
    """Dense matrix with Fraction entries, immutable by convention."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence] | None = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[Fraction(0)] * cols for _ in range(rows)]
        else:
            if len(data) != rows:
                raise ValueError("row count mismatch")
            self.data = [[frac(x) for x in row] for row in data]
            for row in self.data:
                if len(row) != cols:
                    raise ValueError("column count mismatch")

    @staticmethod
    def zeros(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols)

    @staticmethod
    def identity(n: int) -> "Matrix":
        m = Matrix(n, n)
        for i in range(n):
            m.data[i][i] = Fraction(1)
        return m

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "Matrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        return Matrix(r, c, rows)

    @staticmethod
    def from_columns(cols: Sequence[Sequence]) -> "Matrix":
        if not cols:
            return Matrix(0, 0)
        n = len(cols[0])
        m = Matrix(n, len(cols))
        for j, col in enumerate(cols):
            for i in range(n):
                m.data[i][j] = frac(col[i])
        return m

    def column(self, j: int) -> Vector:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "Matrix":
        t = Matrix(self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                t.data[j][i] = self.data[i][j]
        return t

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        out = Matrix(self.rows, self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out.data[i][j] = self.data[i][j] + other.data[i][j]
        return out

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(Fraction(-1))

    def __neg__(self) -> "Matrix":
        return self.scale(Fraction(-1))

    def scale(self, s) -> "Matrix":
        s = frac(s)
        out = Matrix(self.rows, self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out.data[i][j] = s * self.data[i][j]
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        out = Matrix(self.rows, other.cols)
        for i in range(self.rows):
            row = self.data[i]
            for k in range(self.cols):
                a = row[k]
                if a == 0:
                    continue
                ok = other.data[k]
                orow = out.data[i]
                for j in range(other.cols):
                    orow[j] += a * ok[j]
        return out

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        out = [Fraction(0)] * self.rows
        for i in range(self.rows):
            row = self.data[i]
            out[i] = sum((row[j] * frac(v[j]) for j in range(self.cols)), Fraction(0))
        return out

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self):
        raise TypeError("Matrix is not hashable")

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, {self.data})"

    def copy(self) -> "Matrix":
        return Matrix(self.rows, self.cols, self.data)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return Matrix(
            self.rows,
            self.cols + other.cols,
            [self.data[i] + other.data[i] for i in range(self.rows)],
        )


class Subspace:
    """Subspace of K^n given by a list of independent basis vectors."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: Iterable[Sequence]):
        self.ambient_dim = ambient_dim
        self.basis = [[frac(x) for x in v] for v in basis]
        for v in self.basis:
            if len(v) != ambient_dim:
                raise ValueError("basis vector has wrong length")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Matrix:
        """Basis vectors as columns."""
        return Matrix.from_columns(self.basis)

    def contains(self, v: Sequence) -> bool:
        if self.dim == 0:
            return all(frac(x) == 0 for x in v)
        return solve(self.matrix(), [frac(x) for x in v]) is not None

    def __repr__(self) -> str:
        return f"Subspace(dim {self.dim} of {self.ambient_dim})"


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    a = [row[:] for row in m.data]
    rows, cols = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if a[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        a[r], a[pivot_row] = a[pivot_row], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [a[i][j] - f * a[r][j] for j in range(cols)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return Matrix(rows, cols, a), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel(m: Matrix) -> Subspace:
    """Null space basis via rref; free variables yield one vector each."""
    r, pivots = rref(m)
    pivot_set = set(pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r.data[i][f]
        basis.append(v)
    return Subspace(m.cols, basis)


def image(m: Matrix) -> Subspace:
    """Column space, spanned by the pivot columns of m."""
    _, pivots = rref(m)
    return Subspace(m.rows, [m.column(j) for j in pivots])


def solve(m: Matrix, b: Sequence) -> Vector | None:
    """One solution of m x = b with free variables set to zero, or None."""
    if len(b) != m.rows:
        raise ValueError("rhs length mismatch")
    aug = m.hstack(Matrix.from_columns([b]))
    r, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [Fraction(0)] * m.cols
    for i, p in enumerate(pivots):
        x[p] = r.data[i][m.cols]
    return x


def solve_matrix(m: Matrix, b: Matrix) -> Matrix | None:
    """Columnwise solve: X with m X = b, or None if any column fails."""
    cols = []
    for j in range(b.cols):
        x = solve(m, b.column(j))
        if x is None:
            return None
        cols.append(x)
    out = Matrix.from_columns(cols)
    if out.rows == 0:
        out = Matrix(m.cols, b.cols)
    return out


def complement_section(sub: Subspace) -> tuple[Matrix, Matrix]:
    """Coordinate complement of a subspace, chosen by the pivot rule.

    The complement is spanned by the standard basis vectors at the non-pivot
    rows of rref(basis^T).  Returns (projection, inclusion): projection maps
    ambient coordinates to complement coordinates along the subspace, and
    inclusion embeds the complement back, so ambient = sub + complement and
    projection @ inclusion = id.
    """
    n = sub.ambient_dim
    k = sub.dim
    if k == 0:
        return Matrix.identity(n), Matrix.identity(n)
    s = sub.matrix()
    _, pivots = rref(s.transpose())
    pivot_set = set(pivots)
    comp = [j for j in range(n) if j not in pivot_set]
    inclusion = Matrix(n, len(comp))
    for idx, j in enumerate(comp):
        inclusion.data[j][idx] = Fraction(1)
    # Invert [S | C] to read off complement coordinates.
    full = s.hstack(inclusion)
    inv = solve_matrix(full, Matrix.identity(n))
    if inv is None:
        raise ValueError("basis not independent")
    projection = Matrix(len(comp), n, inv.data[k:])
    return projection, inclusion


def decompose(sub: Subspace, comp_inclusion: Matrix, v: Sequence) -> tuple[Vector, Vector]:
    """Coordinates of v in the direct sum sub + complement."""
    full = sub.matrix().hstack(comp_inclusion)
    x = solve(full, [frac(t) for t in v])
    if x is None:
        raise ValueError("vector outside span")
    return x[: sub.dim], x[sub.dim :]
