"""Finite-dimensional Lie algebras given by structure constants.

A Lie algebra is stored as the full tensor c[i][j][k] with
[x_i, x_j] = sum_k c[i][j][k] x_k; antisymmetry and Jacobi are validated at
construction rather than enforced by storage.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Matrix, Vector, frac


class LieAlgebraError(ValueError):
    pass


class AntisymmetryViolation(LieAlgebraError):
    def __init__(self, i: int, j: int, k: int):
        self.indices = (i, j, k)
        super().__init__(f"antisymmetry fails at c^{k}_({i},{j})")


class JacobiViolation(LieAlgebraError):
    def __init__(self, i: int, j: int, k: int, l: int):
        self.indices = (i, j, k, l)
        super().__init__(f"Jacobi identity fails at ({i},{j},{k}) in coordinate {l}")


@dataclass(frozen=True)
class LieAlgebra:
    dim: int
    basis_names: tuple[str, ...]
    c: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def bracket_basis(self, i: int, j: int) -> Vector:
        return list(self.c[i][j])

    def bracket(self, x: Sequence, y: Sequence) -> Vector:
        out = [Fraction(0)] * self.dim
        for i in range(self.dim):
            xi = frac(x[i])
            if xi == 0:
                continue
            for j in range(self.dim):
                yj = frac(y[j])
                if yj == 0:
                    continue
                for k in range(self.dim):
                    out[k] += xi * yj * self.c[i][j][k]
        return out


def new_lie_algebra(names: Sequence[str], c) -> LieAlgebra:
    n = len(names)
    tensor = tuple(
        tuple(tuple(frac(c[i][j][k]) for k in range(n)) for j in range(n))
        for i in range(n)
    )
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if tensor[i][j][k] != -tensor[j][i][k]:
                    raise AntisymmetryViolation(i, j, k)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    s = sum(
                        tensor[i][j][m] * tensor[m][k][l]
                        + tensor[j][k][m] * tensor[m][i][l]
                        + tensor[k][i][m] * tensor[m][j][l]
                        for m in range(n)
                    )
                    if s != 0:
                        raise JacobiViolation(i, j, k, l)
    return LieAlgebra(n, tuple(names), tensor)


def lie_from_pairs(names: Sequence[str], brackets: dict) -> LieAlgebra:
    """Build from {(i, j): vector} entries given only for i < j."""
    n = len(names)
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j), v in brackets.items():
        if not i < j:
            raise ValueError("bracket entries must use i < j")
        for k in range(n):
            c[i][j][k] = frac(v[k])
            c[j][i][k] = -frac(v[k])
    return new_lie_algebra(names, c)


@dataclass(frozen=True)
class GAction:
    """Action of the Lie algebra generators on a vector space."""

    dim_space: int
    rho: tuple[Matrix, ...]


@dataclass(frozen=True)
class ActionViolation:
    i: int
    j: int
    residual: Matrix


def check_action(L: LieAlgebra, a: GAction) -> ActionViolation | None:
    """Verify rho([x_i, x_j]) = rho_i rho_j - rho_j rho_i on all pairs."""
    for m in a.rho:
        if (m.rows, m.cols) != (a.dim_space, a.dim_space):
            raise ValueError("action matrix has wrong shape")
    if len(a.rho) != L.dim:
        raise ValueError("one action matrix per generator required")
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            lhs = Matrix.zeros(a.dim_space, a.dim_space)
            for k in range(L.dim):
                coef = L.c[i][j][k]
                if coef != 0:
                    lhs = lhs + a.rho[k].scale(coef)
            rhs = a.rho[i] @ a.rho[j] - a.rho[j] @ a.rho[i]
            if lhs != rhs:
                return ActionViolation(i, j, lhs - rhs)
    return None


def trivial_action(L: LieAlgebra, dim_space: int) -> GAction:
    return GAction(dim_space, tuple(Matrix.zeros(dim_space, dim_space) for _ in range(L.dim)))


def adjoint_action(L: LieAlgebra) -> GAction:
    n = L.dim
    rho = []
    for i in range(n):
        m = Matrix(n, n)
        for j in range(n):
            for k in range(n):
                m.data[k][j] = L.c[i][j][k]
        rho.append(m)
    return GAction(n, tuple(rho))


def dual_action(a: GAction) -> GAction:
    return GAction(a.dim_space, tuple(-(m.transpose()) for m in a.rho))


def direct_sum_action(a: GAction, b: GAction) -> GAction:
    n = a.dim_space + b.dim_space
    rho = []
    for ra, rb in zip(a.rho, b.rho):
        m = Matrix(n, n)
        for i in range(a.dim_space):
            for j in range(a.dim_space):
                m.data[i][j] = ra.data[i][j]
        for i in range(b.dim_space):
            for j in range(b.dim_space):
                m.data[a.dim_space + i][a.dim_space + j] = rb.data[i][j]
        rho.append(m)
    return GAction(n, tuple(rho))


def tensor_action(a: GAction, b: GAction) -> GAction:
    """Action on A (x) B with basis e_i (x) f_m ordered by (i, m)."""
    na, nb = a.dim_space, b.dim_space
    rho = []
    for ra, rb in zip(a.rho, b.rho):
        m = Matrix(na * nb, na * nb)
        for i in range(na):
            for mm in range(nb):
                col = i * nb + mm
                for ii in range(na):
                    if ra.data[ii][i] != 0:
                        m.data[ii * nb + mm][col] += ra.data[ii][i]
                for mm2 in range(nb):
                    if rb.data[mm2][mm] != 0:
                        m.data[i * nb + mm2][col] += rb.data[mm2][mm]
        rho.append(m)
    return GAction(na * nb, tuple(rho))


def sl2() -> LieAlgebra:
    """Basis (h, e, f) with [h,e]=2e, [h,f]=-2f, [e,f]=h."""
    return lie_from_pairs(
        ["h", "e", "f"],
        {
            (0, 1): [0, 2, 0],
            (0, 2): [0, 0, -2],
            (1, 2): [1, 0, 0],
        },
    )
