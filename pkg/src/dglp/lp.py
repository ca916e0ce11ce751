"""Dg Loday-Pirashvili modules: a non-negative bounded dg g-module V with a
weak morphism alpha: V ~> g, stored as components
alpha_k : V^k -> wedge^k g^dual (x) g for 0 <= k <= u, u = min(top V, dim g).

Three equivalent descriptions are implemented and cross-checked: the
structure equations (verify_lp), the weak-morphism chain condition, and
closedness of a degree-0 cochain in Omega_g(Hom(V, g)).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .complexes import (
    Cochain,
    DgGModule,
    HomIndexer,
    d_ce,
    d_tot,
    form,
    g_module,
    hom_module,
    sort_with_sign,
    trivial_module,
    wedge,
)
from .lie import GAction, LieAlgebra, adjoint_action, check_action, tensor_action
from .linalg import Matrix, frac, solve
from .morphisms import (
    Homotopy,
    WeakMorphism,
    check_weak,
    find_homotopy,
    h0,
    lift,
    wedge_tuples,
)


class NotInvariant(ValueError):
    def __init__(self, i: int, j: int, k: int):
        self.indices = (i, j, k)
        super().__init__(f"pairing not invariant at generators ({i},{j},{k})")


class LPModule:
    """V together with alpha = {alpha_k}, shapes validated at construction."""

    def __init__(self, V: DgGModule, alpha: dict[int, Matrix]):
        if V.bot < 0:
            raise ValueError("V must be non-negative")
        self.V = V
        self.g = g_module(V.L)
        self.u = min(V.top, V.L.dim)
        n = V.L.dim
        self.alpha: dict[int, Matrix] = {}
        for k, m in alpha.items():
            if not 0 <= k <= self.u:
                raise ValueError(f"alpha_{k} outside the range 0..{self.u}")
            rows = len(wedge_tuples(n, k)) * n
            if (m.rows, m.cols) != (rows, V.dim(k)):
                raise ValueError(f"alpha_{k} has wrong shape")
            if not m.is_zero():
                self.alpha[k] = m

    def alpha_of(self, k: int, j: int) -> Cochain:
        """alpha_k applied to the j-th generator of V^k, as a g-valued cochain."""
        n = self.V.L.dim
        out = Cochain(self.g)
        m = self.alpha.get(k)
        if m is None:
            return out
        for w, I in enumerate(wedge_tuples(n, k)):
            for t in range(n):
                coef = m.data[w * n + t][j]
                if coef != 0:
                    out.add_term((I, 0, t), coef)
        return out


@dataclass(frozen=True)
class LPViolation:
    k: int
    generator: int
    residual: Cochain


def structure_residual(lp: LPModule, k: int, j: int) -> Cochain:
    """Residual of alpha_{k+1} d^V_k + alpha_k d^V_CE - d^g_CE alpha_k on
    the j-th generator of V^k; zero for every generator iff lp is a dg LP
    module."""
    V = lp.V
    dk = V.diff_at(k)
    gen = Cochain.generator(V, k, j)
    lhs = Cochain(lp.g)
    for m in range(V.dim(k + 1)):
        if dk.data[m][j] != 0:
            lhs = lhs + lp.alpha_of(k + 1, m).scale(dk.data[m][j])
    for (I, q, jj), coef in d_ce(gen).terms.items():
        lhs = lhs + wedge(form(lp.g, I, coef), lp.alpha_of(q, jj))
    return lhs - d_ce(lp.alpha_of(k, j))


def verify_lp(lp: LPModule) -> LPViolation | None:
    """Check the structure equations
    alpha_{k+1} d^V_k + alpha_k d^V_CE = d^g_CE alpha_k on all generators."""
    for k in sorted(lp.V.degrees):
        for j in range(lp.V.dim(k)):
            residual = structure_residual(lp, k, j)
            if not residual.is_zero():
                return LPViolation(k, j, residual)
    return None


def as_weak_morphism(lp: LPModule) -> WeakMorphism:
    comps = {(k, k): m for k, m in lp.alpha.items()}
    return WeakMorphism(lp.V, lp.g, comps)


def from_weak_morphism(f: WeakMorphism) -> LPModule:
    n = f.source.L.dim
    alpha = {}
    for (k, l), m in f.components.items():
        if l != k:
            if not m.is_zero():
                raise ValueError("morphism into g[0] must have components (k,k) only")
            continue
        alpha[k] = m
    return LPModule(f.source, alpha)


def to_cocycle(lp: LPModule) -> tuple[Cochain, DgGModule, HomIndexer]:
    """The degree-0 cochain c(alpha) in Omega_g(Hom(V, g)); lp is a dg LP
    module iff d_tot(c(alpha)) = 0."""
    H, idx = hom_module(lp.V, lp.g)
    c = Cochain(H)
    n = lp.V.L.dim
    for k, m in lp.alpha.items():
        for w, I in enumerate(wedge_tuples(n, k)):
            for t in range(n):
                for j in range(lp.V.dim(k)):
                    coef = m.data[w * n + t][j]
                    if coef != 0:
                        r, pos = idx.index(-k, k, j, t)
                        c.add_term((I, r, pos), coef)
    return c, H, idx


@dataclass(frozen=True)
class OrdinaryLP:
    """A g-module G with an equivariant map X: G -> g."""

    L: LieAlgebra
    G: GAction
    X: Matrix

    def check(self) -> int | None:
        """Return the first generator index failing equivariance, or None."""
        ad = adjoint_action(self.L)
        for i in range(self.L.dim):
            if self.X @ self.G.rho[i] != ad.rho[i] @ self.X:
                return i
        return None


def ordinary_as_lp(ord_lp: OrdinaryLP) -> LPModule:
    V = DgGModule(ord_lp.L, {0: ord_lp.G.dim_space}, {0: ord_lp.G}, {})
    return LPModule(V, {0: ord_lp.X})


def lift_lp(
    ord_lp: OrdinaryLP,
    V: DgGModule,
    kernel_iso: Matrix,
    rng: random.Random | None = None,
) -> LPModule:
    """Lift an ordinary LP module through an acyclic resolution V of G.

    kernel_iso maps the deterministic basis of ker d^V_0 to G-coordinates.
    """
    bad = ord_lp.check()
    if bad is not None:
        from .morphisms import NotEquivariant

        raise NotEquivariant(bad)
    phi = ord_lp.X @ kernel_iso
    W = g_module(V.L)
    f = lift(phi, V, W, rng=rng)
    return from_weak_morphism(f)


def lp_homotopic(lp: LPModule, lp2: LPModule) -> Homotopy | None:
    """Homotopy h with alpha' - alpha = d_CE h + h d_CE + h d^V, or None."""
    if lp.V is not lp2.V:
        raise ValueError("structures must share the underlying module")
    f = as_weak_morphism(lp)
    f2 = WeakMorphism(lp2.V, lp.g, {(k, k): m for k, m in lp2.alpha.items()})
    return find_homotopy(f, f2)


def from_invariant_pairing(L: LieAlgebra, pairing: Matrix) -> LPModule:
    """V = g (x) g in degree 1 with alpha_1 induced by the pairing.

    The raw assignment alpha_1(x (x) y) = x-sharp (x) y fails the structure
    equations by the term <x, [x1, x2]> y whenever the pairing does not kill
    [g, g], so it is corrected by subtracting its deterministic preimage
    under the (linear) residual operator; the result always satisfies
    verify_lp, and equals the raw assignment whenever that is already valid
    (zero pairing, abelian g).
    """
    n = L.dim
    if (pairing.rows, pairing.cols) != (n, n):
        raise ValueError("pairing must be dim g square")
    if pairing != pairing.transpose():
        raise ValueError("pairing must be symmetric")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = sum(
                    L.c[i][j][m] * pairing.data[m][k] + L.c[i][k][m] * pairing.data[j][m]
                    for m in range(n)
                )
                if s != 0:
                    raise NotInvariant(i, j, k)
    ad = adjoint_action(L)
    V = DgGModule(L, {1: n * n}, {1: tensor_action(ad, ad)}, {})
    # raw alpha_1(x_i (x) x_j) = sum_a <x_i, x_a> xi^a (x) x_j
    rows = n * n  # (wedge singleton a) x (g index t)
    m = Matrix.zeros(rows, n * n)
    for i in range(n):
        for j in range(n):
            col = i * n + j
            for a in range(n):
                if pairing.data[i][a] != 0:
                    m.data[a * n + j][col] += pairing.data[i][a]

    def residual_vector(mat: Matrix, row_index: dict) -> dict[int, Fraction]:
        lp = LPModule(V, {1: mat})
        out: dict[int, Fraction] = {}
        for j in range(n * n):
            res = structure_residual(lp, 1, j)
            for key, coef in res.terms.items():
                ri = row_index.setdefault((j, key), len(row_index))
                out[ri] = out.get(ri, Fraction(0)) + coef
        return out

    row_index: dict = {}
    rhs = residual_vector(m, row_index)
    if not rhs:
        return LPModule(V, {1: m})
    columns = []
    for r in range(rows):
        for c in range(n * n):
            unit = Matrix.zeros(rows, n * n)
            unit.data[r][c] = Fraction(1)
            columns.append(residual_vector(unit, row_index))
    D = Matrix.zeros(len(row_index), rows * n * n)
    for ci, col in enumerate(columns):
        for ri, coef in col.items():
            D.data[ri][ci] = coef
    b = [rhs.get(ri, Fraction(0)) for ri in range(len(row_index))]
    x = solve(D, b)
    assert x is not None  # rhs is D applied to the raw alpha, hence in im(D)
    corrected = Matrix.zeros(rows, n * n)
    ci = 0
    for r in range(rows):
        for c in range(n * n):
            corrected.data[r][c] = m.data[r][c] - x[ci]
            ci += 1
    return LPModule(V, {1: corrected})


def abelian_extension_equiv(
    L: LieAlgebra, action2: GAction, alpha2: Matrix
) -> tuple[bool, bool]:
    """For V concentrated in degree 2: compare the dg LP condition for
    alpha_2 against the CE 2-cocycle condition for
    c_alpha in C^2(g, Hom(V^2, g))."""
    n = L.dim
    V = DgGModule(L, {2: action2.dim_space}, {2: action2}, {})
    lp = LPModule(V, {2: alpha2})
    lp_ok = verify_lp(lp) is None

    # ungraded Hom(V^2, g) as a degree-0 module
    hom_dim = action2.dim_space * n
    ad = adjoint_action(L)
    rho = []
    for i in range(n):
        m = Matrix.zeros(hom_dim, hom_dim)
        for a in range(action2.dim_space):
            for t in range(n):
                col = a * n + t
                for t2 in range(n):
                    if ad.rho[i].data[t2][t] != 0:
                        m.data[a * n + t2][col] += ad.rho[i].data[t2][t]
                for a2 in range(action2.dim_space):
                    if action2.rho[i].data[a][a2] != 0:
                        m.data[a2 * n + t][col] -= action2.rho[i].data[a][a2]
        rho.append(m)
    H = DgGModule(L, {0: hom_dim}, {0: GAction(hom_dim, tuple(rho))}, {})
    c = Cochain(H)
    for w, I in enumerate(wedge_tuples(n, 2)):
        for t in range(n):
            for a in range(action2.dim_space):
                coef = alpha2.data[w * n + t][a]
                if coef != 0:
                    c.add_term((I, 0, a * n + t), coef)
    cocycle_ok = d_ce(c).is_zero()
    return lp_ok, cocycle_ok
