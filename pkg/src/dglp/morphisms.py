"""Weak morphisms of dg g-modules, dg lifting, and homotopy solving.

A weak morphism f: V ~> W is generated by components
f_k^l : V^k -> wedge^l g^dual (x) W^(k-l) and extends Omega_g-linearly,
f(omega (x) v) = omega ^ f(v).  A homotopy has the same shape one internal
degree lower and extends with the sign (-1)^p on p-forms.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .complexes import (
    Cochain,
    DgGModule,
    Key,
    d_ce,
    d_tot,
    form,
    omega_keys,
    sort_with_sign,
    wedge,
)
from .linalg import (
    Matrix,
    Subspace,
    Vector,
    complement_section,
    frac,
    image,
    kernel,
    rank,
    solve,
    solve_matrix,
)


class LiftError(ValueError):
    pass


class NotAcyclic(LiftError):
    def __init__(self, degree: int):
        self.degree = degree
        super().__init__(f"source complex has cohomology in degree {degree}")


class NotEquivariant(LiftError):
    def __init__(self, generator: int):
        self.generator = generator
        super().__init__(f"induced map fails equivariance for generator {generator}")


class WellDefinednessFailure(LiftError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"lift recursion inconsistent on ker(d) at degree {k}")


def wedge_tuples(n: int, l: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n), l))


class OmegaMap:
    """Componentwise map of total complexes of fixed degree (0 or -1)."""

    def __init__(
        self,
        source: DgGModule,
        target: DgGModule,
        degree: int,
        components: dict[tuple[int, int], Matrix] | None = None,
    ):
        if degree not in (0, -1):
            raise ValueError("only degree 0 and -1 maps are supported")
        self.source = source
        self.target = target
        self.degree = degree
        self.components: dict[tuple[int, int], Matrix] = {}
        n = source.L.dim
        for (k, l), m in (components or {}).items():
            tq = k - l + degree
            rows = len(wedge_tuples(n, l)) * target.dim(tq)
            if m.cols != source.dim(k) or m.rows != rows:
                raise ValueError(f"component ({k},{l}) has wrong shape")
            if not m.is_zero():
                self.components[(k, l)] = m

    def component(self, k: int, l: int) -> Matrix:
        n = self.source.L.dim
        tq = k - l + self.degree
        rows = len(wedge_tuples(n, l)) * self.target.dim(tq)
        return self.components.get((k, l), Matrix.zeros(rows, self.source.dim(k)))

    def on_generator(self, q: int, j: int) -> Cochain:
        out = Cochain(self.target)
        n = self.source.L.dim
        for (k, l), m in self.components.items():
            if k != q:
                continue
            tq = k - l + self.degree
            dim_t = self.target.dim(tq)
            tuples = wedge_tuples(n, l)
            for w, I in enumerate(tuples):
                for t in range(dim_t):
                    coef = m.data[w * dim_t + t][j]
                    if coef != 0:
                        out.add_term((I, tq, t), coef)
        return out

    def apply(self, c: Cochain) -> Cochain:
        if c.module is not self.source:
            raise ValueError("cochain over wrong module")
        out = Cochain(self.target)
        for (I, q, j), coef in c.terms.items():
            img = self.on_generator(q, j)
            if img.is_zero():
                continue
            sign = coef
            if self.degree % 2 and len(I) % 2:
                sign = -sign
            out = out + wedge(form(self.target, I, 1), img).scale(sign)
        return out


def map_from_generator_images(
    source: DgGModule, target: DgGModule, degree: int, images: dict[tuple[int, int], Cochain]
) -> dict[tuple[int, int], Matrix]:
    """Scatter per-generator image cochains into component matrices."""
    n = source.L.dim
    comps: dict[tuple[int, int], Matrix] = {}
    wpos = {l: {I: w for w, I in enumerate(wedge_tuples(n, l))} for l in range(n + 1)}
    for (q, j), c in images.items():
        for (I, tq, t), coef in c.terms.items():
            l = len(I)
            if tq != q - l + degree:
                raise ValueError("image cochain has wrong degree")
            key = (q, l)
            if key not in comps:
                rows = len(wedge_tuples(n, l)) * target.dim(tq)
                comps[key] = Matrix.zeros(rows, source.dim(q))
            comps[key].data[wpos[l][I] * target.dim(tq) + t][j] += coef
    return comps


class WeakMorphism(OmegaMap):
    def __init__(self, source, target, components=None):
        super().__init__(source, target, 0, components)


class Homotopy(OmegaMap):
    def __init__(self, source, target, components=None):
        super().__init__(source, target, -1, components)


def identity_morphism(V: DgGModule) -> WeakMorphism:
    comps = {(q, 0): Matrix.identity(V.dim(q)) for q in V.degrees}
    return WeakMorphism(V, V, comps)


def compose(g: OmegaMap, f: OmegaMap) -> OmegaMap:
    """g after f; defined when at least one of the maps has degree 0."""
    if f.target is not g.source:
        raise ValueError("maps not composable")
    degree = f.degree + g.degree
    images = {}
    for (q, j) in f.source.generators():
        images[(q, j)] = g.apply(f.on_generator(q, j))
    comps = map_from_generator_images(f.source, g.target, degree, images)
    cls = WeakMorphism if degree == 0 else Homotopy
    return cls(f.source, g.target, comps)


@dataclass(frozen=True)
class ChainViolation:
    k: int
    generator: int
    residual: Cochain


def check_weak(f: WeakMorphism) -> ChainViolation | None:
    """Verify f d_tot = d_tot f on every source generator."""
    for (q, j) in f.source.generators():
        gen = Cochain.generator(f.source, q, j)
        residual = f.apply(d_tot(gen)) - d_tot(f.apply(gen))
        if not residual.is_zero():
            return ChainViolation(q, j, residual)
    return None


def homotopy_residual(f: WeakMorphism, f2: WeakMorphism, h: Homotopy, q: int, j: int) -> Cochain:
    gen = Cochain.generator(f.source, q, j)
    return (f2.apply(gen) - f.apply(gen)) - (d_tot(h.apply(gen)) + h.apply(d_tot(gen)))


def is_homotopy(f: WeakMorphism, f2: WeakMorphism, h: Homotopy) -> bool:
    """Exact check of f' - f = d h + h d on all source generators."""
    return all(
        homotopy_residual(f, f2, h, q, j).is_zero() for (q, j) in f.source.generators()
    )


def kernel_projection(K: Subspace) -> tuple[Matrix, Matrix, Matrix]:
    """(proj_onto_sub_coords, proj_onto_complement_coords, complement_inclusion)."""
    n = K.ambient_dim
    comp_proj, comp_incl = complement_section(K)
    if K.dim == 0:
        return Matrix.zeros(0, n), comp_proj, comp_incl
    full = K.matrix().hstack(comp_incl)
    inv = solve_matrix(full, Matrix.identity(n))
    assert inv is not None
    sub_proj = Matrix(K.dim, n, inv.data[: K.dim])
    return sub_proj, comp_proj, comp_incl


def induced_kernel_action(V: DgGModule, q: int, K: Subspace) -> list[Matrix]:
    """Action matrices restricted to an invariant kernel, in K-coordinates."""
    mats = []
    km = K.matrix()
    for rho in V.action(q).rho:
        sol = solve_matrix(km, rho @ km)
        if sol is None:
            raise ValueError("kernel is not action-invariant")
        mats.append(sol)
    return mats


def h0(f: WeakMorphism) -> Matrix:
    """Induced map ker d^V_0 -> ker d^W_0 in the deterministic kernel bases."""
    V, W = f.source, f.target
    KV = kernel(V.diff_at(0)) if V.dim(0) else Subspace(0, [])
    KW = kernel(W.diff_at(0)) if W.dim(0) else Subspace(0, [])
    f00 = f.component(0, 0)
    if KV.dim == 0:
        return Matrix.zeros(KW.dim, 0)
    img = f00 @ KV.matrix()
    sol = solve_matrix(KW.matrix(), img)
    if sol is None:
        raise ValueError("f_0 does not preserve kernels")
    return sol


def _random_extension(W: DgGModule, degree: int, rng: random.Random) -> Cochain:
    keys = omega_keys(W, degree)
    c = Cochain(W)
    for key in keys:
        v = rng.randint(-2, 2)
        if v:
            c.add_term(key, Fraction(v))
    return c


def check_acyclic(V: DgGModule) -> int | None:
    """Return the first positive degree with cohomology, or None if acyclic."""
    for q in sorted(V.degrees):
        if q <= 0:
            continue
        r_in = rank(V.diff_at(q - 1)) if V.dim(q - 1) else 0
        r_out = rank(V.diff_at(q)) if V.dim(q + 1) else 0
        if r_in + r_out != V.dim(q):
            return q
    return None


def lift(phi: Matrix, V: DgGModule, W: DgGModule, rng: random.Random | None = None) -> WeakMorphism:
    """Lift a g-module map of degree-0 kernels to a weak morphism V ~> W.

    V must be non-negative and acyclic in positive degrees.  phi is given in
    the deterministic kernel bases of d^V_0 and d^W_0.  The construction
    follows the usual recursion: fix f on the image of d and extend on the
    pivot complement (by zero, or by rng-seeded values when rng is given --
    any extension yields a valid lift, which the homotopy tests exercise).
    """
    if V.bot < 0:
        raise ValueError("source must be non-negative")
    bad = check_acyclic(V)
    if bad is not None:
        raise NotAcyclic(bad)
    KV = kernel(V.diff_at(0)) if V.dim(0) else Subspace(0, [])
    KW = kernel(W.diff_at(0)) if W.dim(0) else Subspace(0, [])
    if (phi.cols, phi.rows) != (KV.dim, KW.dim):
        raise ValueError("phi has wrong shape for the kernel bases")
    rho_v = induced_kernel_action(V, 0, KV) if KV.dim else [Matrix.zeros(0, 0)] * V.L.dim
    rho_w = induced_kernel_action(W, 0, KW) if KW.dim else [Matrix.zeros(0, 0)] * V.L.dim
    for i in range(V.L.dim):
        if phi @ rho_v[i] != rho_w[i] @ phi:
            raise NotEquivariant(i)

    images: dict[tuple[int, int], Cochain] = {}
    # f_0: phi on ker d_0, extension on the pivot complement.
    sub_proj, comp_proj, comp_incl = kernel_projection(KV)
    f0 = Matrix.zeros(W.dim(0), V.dim(0))
    if KV.dim:
        f0 = (KW.matrix() @ phi) @ sub_proj
    ext0 = {}
    for t in range(comp_incl.cols):
        ext0[t] = _random_extension(W, 0, rng) if rng else Cochain(W)
    for j in range(V.dim(0)):
        c = Cochain(W, {((), 0, m): f0.data[m][j] for m in range(W.dim(0))})
        for t in range(comp_incl.cols):
            w = comp_proj.data[t][j]
            if w != 0:
                c = c + ext0[t].scale(w)
        images[(0, j)] = c

    current = WeakMorphism(V, W, map_from_generator_images(V, W, 0, images))

    for k in sorted(V.degrees):
        if V.dim(k + 1) == 0:
            break
        dk = V.diff_at(k)

        def rhs(vec: Sequence) -> Cochain:
            c = Cochain(V, {((), k, j): frac(vec[j]) for j in range(V.dim(k))})
            return d_tot(current.apply(c)) - current.apply(d_ce(c))

        # consistency of the recursion on ker d_k
        for z in kernel(dk).basis:
            if not rhs(z).is_zero():
                raise WellDefinednessFailure(k)
        img = image(dk)
        section = solve_matrix(dk, img.matrix()) if img.dim else Matrix.zeros(V.dim(k), 0)
        assert section is not None
        sub_proj, comp_proj, comp_incl = kernel_projection(img)
        rhs_on_img = [rhs(section.column(t)) for t in range(img.dim)]
        exts = {}
        for t in range(comp_incl.cols):
            exts[t] = _random_extension(W, k + 1, rng) if rng else Cochain(W)
        for j in range(V.dim(k + 1)):
            c = Cochain(W)
            for t in range(img.dim):
                u = sub_proj.data[t][j]
                if u != 0:
                    c = c + rhs_on_img[t].scale(u)
            for t in range(comp_incl.cols):
                w = comp_proj.data[t][j]
                if w != 0:
                    c = c + exts[t].scale(w)
            images[(k + 1, j)] = c
        current = WeakMorphism(V, W, map_from_generator_images(V, W, 0, images))
    return current


def find_homotopy(f: WeakMorphism, f2: WeakMorphism) -> Homotopy | None:
    """Solve the global linear system f' - f = d h + h d for h exactly.

    Works for arbitrary bounded sources; returns None when no homotopy
    exists (e.g. when the induced kernel maps differ).
    """
    if f.source is not f2.source or f.target is not f2.target:
        raise ValueError("morphisms must share source and target")
    V, W = f.source, f.target
    n = V.L.dim
    unknowns: list[tuple[int, int, int, int, int]] = []
    for k in sorted(V.degrees):
        for l in range(n + 1):
            tq = k - l - 1
            if W.dim(tq) == 0:
                continue
            for w, _ in enumerate(wedge_tuples(n, l)):
                for m in range(W.dim(tq)):
                    for j in range(V.dim(k)):
                        unknowns.append((k, l, w, m, j))
    gens = V.generators()
    dtot_of_gen = {g: d_tot(Cochain.generator(V, *g)) for g in gens}

    row_index: dict[tuple[tuple[int, int], Key], int] = {}
    cols: list[dict[int, Fraction]] = []

    def col_entry(col: dict[int, Fraction], g, key, coef):
        r = row_index.setdefault((g, key), len(row_index))
        col[r] = col.get(r, Fraction(0)) + coef

    for (k, l, w, m, j) in unknowns:
        I = wedge_tuples(n, l)[w]
        base = Cochain(W, {(I, k - l - 1, m): Fraction(1)})
        col: dict[int, Fraction] = {}
        # d_tot(h(v)) contribution for the generator v = (k, j)
        for key, coef in d_tot(base).terms.items():
            col_entry(col, (k, j), key, coef)
        # h(d_tot(v')) contributions
        for g, dg in dtot_of_gen.items():
            for (J, q, jj), coef in dg.terms.items():
                if q != k or jj != j:
                    continue
                sign = -1 if len(J) % 2 else 1
                prod = wedge(form(W, J, 1), base)
                for key2, c2 in prod.terms.items():
                    col_entry(col, g, key2, coef * sign * c2)
        cols.append(col)

    target: dict[int, Fraction] = {}
    for g in gens:
        gen = Cochain.generator(V, *g)
        diff = f2.apply(gen) - f.apply(gen)
        for key, coef in diff.terms.items():
            r = row_index.setdefault((g, key), len(row_index))
            target[r] = coef

    nrows = len(row_index)
    mat = Matrix.zeros(nrows, len(unknowns))
    for ci, col in enumerate(cols):
        for r, coef in col.items():
            mat.data[r][ci] = coef
    b = [Fraction(0)] * nrows
    for r, coef in target.items():
        b[r] = coef
    x = solve(mat, b)
    if x is None:
        return None
    comps: dict[tuple[int, int], Matrix] = {}
    dim_t = {}
    for (k, l, w, m, j), val in zip(unknowns, x):
        if val == 0:
            continue
        key = (k, l)
        if key not in comps:
            rows = len(wedge_tuples(n, l)) * W.dim(k - l - 1)
            comps[key] = Matrix.zeros(rows, V.dim(k))
        comps[key].data[w * W.dim(k - l - 1) + m][j] = val
    return Homotopy(V, W, comps)
