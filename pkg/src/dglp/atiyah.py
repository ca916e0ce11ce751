"""Dg derivations, twisted Atiyah cocycles, and the induced Leibniz
structure on total cohomology.

The derivation delta attached to alpha is determined by its values on the
dual generators xi^t, which live in Omega_g(V-dual[-1]) and are read off
alpha by the pairing <alpha_k(v) | xi> = <v[1] | delta_k(xi)>.  The Atiyah
cocycle on a coefficient module W tabulates
(v, w) |-> (-1)^(|v|-1) alpha(v) |> w and its closedness is checked in the
Hom complex Omega_g(Hom(V[1] (x) W, W)) assembled from ce_complex builders.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import (
    Cochain,
    CohomologySummary,
    DgGModule,
    HomIndexer,
    Key,
    TensorIndexer,
    d_ce,
    d_tot,
    dtot_matrix,
    dual_module,
    form,
    g_act,
    hom_module,
    iota_g_valued,
    shift,
    sort_with_sign,
    tensor_module,
    total_cohomology,
    trivial_module,
    wedge,
)
from .linalg import Matrix, Vector, frac, solve
from .lp import LPModule, verify_lp
from .morphisms import wedge_tuples


@dataclass
class DgDerivation:
    lp: LPModule
    module: DgGModule  # V-dual shifted down by one
    generator_values: dict[int, Cochain]

    def on_form(self, c: Cochain) -> Cochain:
        """Extend the generator values as an even derivation over forms.

        c must be a pure form (internal degree 0 terms only); the result
        lives in Omega_g of the shifted dual module.
        """
        out = Cochain(self.module)
        for (J, q, _), coef in c.terms.items():
            if q != 0:
                raise ValueError("derivation extension expects a pure form")
            p = len(J)
            for a, t in enumerate(J):
                val = self.generator_values.get(t)
                if val is None or val.is_zero():
                    continue
                suffix = p - 1 - a
                for (K, qd, m), cv in val.terms.items():
                    # move the internal factor past the remaining suffix forms
                    sgn = -1 if (qd * suffix) % 2 else 1
                    s2, merged = sort_with_sign(J[:a] + K + J[a + 1 :])
                    if s2:
                        out.add_term((merged, qd, m), coef * cv * sgn * s2)
        return out


def derivation_from_lp(lp: LPModule) -> DgDerivation:
    """Generator values of delta from alpha via the duality pairing;
    the compatibility d_tot delta = delta d_CE is verified exactly."""
    V = lp.V
    n = V.L.dim
    dual, didx = dual_module(V)
    D = shift(dual, -1)
    values: dict[int, Cochain] = {}
    for t in range(n):
        c = Cochain(D)
        for k, m in lp.alpha.items():
            for w, I in enumerate(wedge_tuples(n, k)):
                for j in range(V.dim(k)):
                    coef = m.data[w * n + t][j]
                    if coef != 0:
                        r, pos = didx.index(-k, k, j, 0)
                        c.add_term((I, r + 1, pos), coef)
        values[t] = c
    der = DgDerivation(lp, D, values)
    carrier = trivial_module(V.L)
    for t in range(n):
        lhs = d_tot(values[t])
        xi = Cochain(carrier, {((t,), 0, 0): Fraction(1)})
        rhs = der.on_form(d_ce(xi))
        if lhs != rhs:
            raise ValueError(f"derivation incompatible with differentials at xi^{t}")
    return der


def alpha_from_derivation(der: DgDerivation) -> dict[int, Matrix]:
    """Inverse of the duality pairing; returns alpha component matrices."""
    lp = der.lp
    V = lp.V
    n = V.L.dim
    _, didx = dual_module(V)
    alpha: dict[int, Matrix] = {}
    wpos = {l: {I: w for w, I in enumerate(wedge_tuples(n, l))} for l in range(n + 1)}
    for t, c in der.generator_values.items():
        for (I, qd, pos), coef in c.terms.items():
            k, j, _ = didx.split(qd - 1, pos)
            if k not in alpha:
                alpha[k] = Matrix.zeros(len(wedge_tuples(n, k)) * n, V.dim(k))
            alpha[k].data[wpos[k][I] * n + t][j] += coef
    return {k: m for k, m in alpha.items() if not m.is_zero()}


def naive_connection_covariant(lp: LPModule, k: int, j: int, c: Cochain) -> Cochain:
    """nabla_{v[1]} = iota_{alpha(v)} for the generator v = (k, j) of V."""
    return iota_g_valued(lp.alpha_of(k, j), c)


@dataclass
class AtiyahCocycle:
    lp: LPModule
    W: DgGModule
    # (k, j, q, m): V-generator (k, j) paired with W-generator (q, m)
    table: dict[tuple[int, int, int, int], Cochain]

    def entry(self, k: int, j: int, q: int, m: int) -> Cochain:
        return self.table.get((k, j, q, m), Cochain(self.W))


def atiyah_cocycle(lp: LPModule, W: DgGModule) -> AtiyahCocycle:
    table: dict[tuple[int, int, int, int], Cochain] = {}
    for (k, j) in lp.V.generators():
        gv = lp.alpha_of(k, j)
        if gv.is_zero():
            continue
        sign = -1 if (k - 1) % 2 else 1
        for (q, m) in W.generators():
            c = g_act(gv, Cochain.generator(W, q, m)).scale(sign)
            if not c.is_zero():
                table[(k, j, q, m)] = c
    return AtiyahCocycle(lp, W, table)


@dataclass
class HomComplexContext:
    """Omega_g(Hom(V[1] (x) W, W)) with the encode/decode index plumbing."""

    source: DgGModule  # V[1] (x) W
    tidx: TensorIndexer
    H: DgGModule
    hidx: HomIndexer


def hom_context(lp: LPModule, W: DgGModule) -> HomComplexContext:
    M, tidx = tensor_module(shift(lp.V, 1), W)
    H, hidx = hom_module(M, W)
    return HomComplexContext(M, tidx, H, hidx)


def encode_table(ctx: HomComplexContext, at: AtiyahCocycle) -> Cochain:
    c = Cochain(ctx.H)
    for (k, j, q, m), entry in at.table.items():
        s, pos = ctx.tidx.index(k - 1, j, q, m)
        for (I, qw, t), coef in entry.terms.items():
            r = qw - s
            _, hpos = ctx.hidx.index(r, s, pos, t)
            c.add_term((I, r, hpos), coef)
    return c


def decode_cochain(ctx: HomComplexContext, lp: LPModule, W: DgGModule, c: Cochain) -> dict:
    table: dict[tuple[int, int, int, int], Cochain] = {}
    for (I, r, hpos), coef in c.terms.items():
        s, pos, t = ctx.hidx.split(r, hpos)
        qv, j, q, m = ctx.tidx.split(s, pos)
        key = (qv + 1, j, q, m)
        table.setdefault(key, Cochain(W)).add_term((I, s + r, t), coef)
    return {k: v for k, v in table.items() if not v.is_zero()}


def check_cocycle(at: AtiyahCocycle, ctx: HomComplexContext | None = None) -> Cochain | None:
    """Return None when the encoded table is d_tot-closed, else the residual."""
    ctx = ctx or hom_context(at.lp, at.W)
    residual = d_tot(encode_table(ctx, at))
    return None if residual.is_zero() else residual


def perturb_cocycle(at: AtiyahCocycle, perturbation: Cochain, ctx: HomComplexContext) -> AtiyahCocycle:
    """Cocycle of the connection shifted by an Omega-linear degree-0 tensor.

    The perturbation is a degree-0 cochain over the Hom complex; changing
    the connection by it changes the cocycle by its d_tot, so the new table
    is manifestly cohomologous to the old one.
    """
    if not perturbation.is_zero() and perturbation.degree() != 0:
        raise ValueError("perturbation must have total degree 0")
    delta = decode_cochain(ctx, at.lp, at.W, d_tot(perturbation))
    table = dict(at.table)
    for key, c in delta.items():
        merged = table.get(key, Cochain(at.W)) + c
        if merged.is_zero():
            table.pop(key, None)
        else:
            table[key] = merged
    return AtiyahCocycle(at.lp, at.W, table)


def class_equal(at: AtiyahCocycle, at2: AtiyahCocycle, ctx: HomComplexContext | None = None) -> Cochain | None:
    """Primitive of at2 - at in the Hom complex, or None when the classes differ."""
    ctx = ctx or hom_context(at.lp, at.W)
    diff = encode_table(ctx, at2) - encode_table(ctx, at)
    D, src, dst = dtot_matrix(ctx.H, 0)
    from .complexes import cochain_to_vector, vector_to_cochain

    b = cochain_to_vector(diff, dst)
    x = solve(D, b)
    if x is None:
        return None
    return vector_to_cochain(ctx.H, src, x)


# ---------------------------------------------------------------------------
# Leibniz structure on total cohomology


def bracket_cochain(lp: LPModule, target: DgGModule, a: Cochain, b: Cochain) -> Cochain:
    """Omega-bilinear extension of r(v (x) w) = alpha(v) |> w.

    a lives over V, b over the target module; the Koszul sign moves the
    form part of b past the internal degree of each term of a.
    """
    out = Cochain(target)
    for (I, k, j), ca in a.terms.items():
        gv = lp.alpha_of(k, j)
        if gv.is_zero():
            continue
        signed = Cochain(target)
        for (J, q, m), cb in b.terms.items():
            sgn = -1 if (k * len(J)) % 2 else 1
            signed.add_term((J, q, m), cb * sgn)
        out = out + wedge(form(target, I, ca), g_act(gv, signed))
    return out


@dataclass
class CohomologyAction:
    lp: LPModule
    source_cohomology: dict[int, CohomologySummary]
    target_cohomology: dict[int, CohomologySummary]
    target: DgGModule

    def representative(self, deg: int, i: int, of_target: bool = False) -> Cochain:
        coh = self.target_cohomology if of_target else self.source_cohomology
        return coh[deg].representatives[i]

    def act(self, deg_a: int, ia: int, deg_b: int, ib: int) -> Vector:
        """Class coordinates of r([a], [b]) in H^(deg_a + deg_b) of the target."""
        a = self.source_cohomology[deg_a].representatives[ia]
        b = self.target_cohomology[deg_b].representatives[ib]
        c = bracket_cochain(self.lp, self.target, a, b)
        out_deg = deg_a + deg_b
        return self.target_cohomology[out_deg].project(c)

    def act_cochain(self, a: Cochain, b: Cochain) -> Cochain:
        return bracket_cochain(self.lp, self.target, a, b)


def leibniz_module_on_cohomology(lp: LPModule, W: DgGModule) -> CohomologyAction:
    return CohomologyAction(
        lp,
        total_cohomology(lp.V),
        total_cohomology(W),
        W,
    )


def leibniz_on_cohomology(lp: LPModule) -> CohomologyAction:
    coh = total_cohomology(lp.V)
    return CohomologyAction(lp, coh, coh, lp.V)
