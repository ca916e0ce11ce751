"""The Leibniz-infinity[1] tower of brackets attached to an LP module.

On M = Omega_g(V[1]) the tower is R_1 = d_tot, R_2 the twisted Atiyah
cocycle, and for higher arities the closed form

    R_N(g_0, ..., g_{N-1}) =
      prod_{i<N-1} (-1)^(deg g_i) (iota_{a(g_0)} ... iota_{a(g_{N-3})} a(g_{N-2})) |> g_{N-1}

with a = alpha read through the shift (deg g = |v| - 1 on V[1] generators).
The same engine runs on V[1] (+) W with the anchor extended by zero on W,
which packages the module actions S_k and their axioms as the restriction
of the generalized Jacobi identity to tuples ending in W.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .complexes import (
    Cochain,
    DgGModule,
    SumIndexer,
    d_tot,
    direct_sum,
    form,
    g_act,
    iota_g_valued,
    shift,
    sort_with_sign,
    wedge,
)
from .lp import LPModule


@dataclass(frozen=True)
class ShuffleSet:
    p: int
    q: int
    # each permutation lists original 0-based positions in their new order
    permutations: tuple[tuple[int, ...], ...]
    parities: tuple[int, ...]


def permutation_parity(seq: Sequence[int]) -> int:
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def shuffles(p: int, q: int) -> ShuffleSet:
    """All (p, q)-shuffles in lexicographic order of the first block."""
    perms = []
    for S in itertools.combinations(range(p + q), p):
        rest = tuple(i for i in range(p + q) if i not in S)
        perms.append(S + rest)
    return ShuffleSet(p, q, tuple(perms), tuple(permutation_parity(s) for s in perms))


def koszul_sign(sigma: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of reordering graded elements: product of (-1)^(d_a d_b) over
    inversions of the permutation (new order given by original positions)."""
    if len(sigma) != len(degrees):
        raise ValueError("degree list must match permutation size")
    sign = 1
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j] and (degrees[sigma[i]] * degrees[sigma[j]]) % 2:
                sign = -sign
    return sign


GenKey = tuple[int, int]


@dataclass
class BracketTable:
    arity: int
    module: DgGModule
    entries: dict[tuple[GenKey, ...], Cochain]

    def entry(self, gens: tuple[GenKey, ...]) -> Cochain:
        return self.entries.get(gens, Cochain(self.module))


class LeibnizTower:
    """Brackets lambda_1 = d_tot plus tabulated lambda_n for n >= 2."""

    def __init__(
        self,
        module: DgGModule,
        anchor: Callable[[int, int], Cochain],
        max_arity: int,
    ):
        self.module = module
        self.anchor = anchor
        self.max_arity = max_arity
        self.tables: dict[int, BracketTable] = {}
        gens = module.generators()
        for arity in range(2, max_arity + 1):
            entries = {}
            for tup in itertools.product(gens, repeat=arity):
                c = self.closed_form(tup)
                if not c.is_zero():
                    entries[tup] = c
            self.tables[arity] = BracketTable(arity, module, entries)

    def closed_form(self, gens: tuple[GenKey, ...]) -> Cochain:
        """Iterated-contraction formula with the stepwise sign
        prod_{i < N-1} (-1)^(deg g_i)."""
        N = len(gens)
        a = self.anchor(*gens[N - 2])
        for g in reversed(gens[: N - 2]):
            a = iota_g_valued(self.anchor(*g), a)
            if a.is_zero():
                break
        sign = 1
        for (q, _) in gens[: N - 1]:
            if q % 2:
                sign = -sign
        return g_act(a, Cochain.generator(self.module, *gens[N - 1])).scale(sign)

    def lam(self, args: list[Cochain]) -> Cochain:
        n = len(args)
        if n == 1:
            return d_tot(args[0])
        if n > self.max_arity:
            raise ValueError("tower not computed to this arity")
        return evaluate_bracket(self.tables[n], args)


def evaluate_bracket(table: BracketTable, args: list[Cochain]) -> Cochain:
    """Omega_g-multilinear extension of a degree-(+1) bracket table.

    Pulling a form of degree p out of slot i costs
    (-1)^(p * (1 + deg g_1 + ... + deg g_{i-1})), the 1 accounting for the
    bracket's own degree.
    """
    M = table.module
    out = Cochain(M)
    if len(args) != table.arity:
        raise ValueError("arity mismatch")
    for combo in itertools.product(*(list(a.terms.items()) for a in args)):
        keys = [k for k, _ in combo]
        coef = Fraction(1)
        for _, c in combo:
            coef *= c
        gens = tuple((q, j) for (_, q, j) in keys)
        entry = table.entries.get(gens)
        if entry is None:
            continue
        sign = 1
        running = 1  # 1 for the bracket degree, then accumulate generator degrees
        all_forms: tuple[int, ...] = ()
        for (I, q, _) in keys:
            if (len(I) * running) % 2:
                sign = -sign
            running += q
            all_forms += I
        s2, merged = sort_with_sign(all_forms)
        if not s2:
            continue
        prod = wedge(form(M, merged, 1), entry)
        out = out + prod.scale(coef * sign * s2)
    return out


def kapranov_tower(lp: LPModule, max_arity: int) -> LeibnizTower:
    M = shift(lp.V, 1)

    def anchor(q: int, j: int) -> Cochain:
        return lp.alpha_of(q + 1, j)

    return LeibnizTower(M, anchor, max_arity)


def kapranov_brackets(lp: LPModule, max_arity: int) -> list[BracketTable]:
    tower = kapranov_tower(lp, max_arity)
    return [tower.tables[n] for n in range(2, max_arity + 1)]


def default_max_arity(lp: LPModule) -> int:
    return min(lp.u + 2, 6)


@dataclass(frozen=True)
class RecursionMismatch:
    arity: int
    gens: tuple[GenKey, ...]
    difference: Cochain


def kapranov_recursion_check(lp: LPModule, max_arity: int) -> RecursionMismatch | None:
    """Recompute each table from the previous one through the connection
    recursion R_{k+1}(g_0, ...) = (-1)^(deg g_0) [nabla_{g_0}, R_k](g_1, ...)
    and compare with the closed form entrywise."""
    tower = kapranov_tower(lp, max_arity)
    M = tower.module
    gens = M.generators()
    for arity in range(3, max_arity + 1):
        prev = tower.tables[arity - 1]
        for tup in itertools.product(gens, repeat=arity):
            head, rest = tup[0], tup[1:]
            nabla_head = lp.alpha_of(head[0] + 1, head[1])
            inner = evaluate_bracket(prev, [Cochain.generator(M, *g) for g in rest])
            rec = iota_g_valued(nabla_head, inner)
            # commutator terms: R_k applied with nabla_{g_0} hitting each slot;
            # contraction kills pure generators, so these vanish identically,
            # but they are computed to keep the recursion honest.
            running = 0
            for i, g in enumerate(rest):
                hit = iota_g_valued(nabla_head, Cochain.generator(M, *g))
                if not hit.is_zero():
                    args = [Cochain.generator(M, *gg) for gg in rest]
                    args[i] = hit
                    sgn = -1 if (head[0] * running) % 2 else 1
                    rec = rec - evaluate_bracket(prev, args).scale(sgn)
                running += g[0]
            if head[0] % 2:
                rec = rec.scale(-1)
            diff = rec - tower.tables[arity].entry(tup)
            if not diff.is_zero():
                return RecursionMismatch(arity, tup, diff)
    return None


@dataclass(frozen=True)
class JacobiCounterexample:
    n: int
    args: list[Cochain]
    residual: Cochain


def generalized_jacobi(tower: LeibnizTower, args: list[Cochain]) -> Cochain:
    """The n-th generalized Jacobi sum; zero iff the identity holds on args."""
    n = len(args)
    degrees = [a.degree() for a in args]
    total = Cochain(tower.module)
    for i in range(1, n + 1):
        j = n + 1 - i
        for k in range(j, n + 1):
            p = k - j
            sh = shuffles(p, j - 1)
            for perm in sh.permutations:
                # perm reorders positions 0..k-2 (arguments v_1..v_{k-1})
                eps = koszul_sign(perm, degrees[: k - 1])
                front = perm[:p]
                extra = sum(degrees[t] for t in front)
                sgn = eps * (-1 if extra % 2 else 1)
                inner_args = [args[t] for t in perm[p:]] + [args[k - 1]]
                inner = tower.lam(inner_args)
                if inner.is_zero():
                    continue
                outer_args = [args[t] for t in front] + [inner] + list(args[k:])
                total = total + tower.lam(outer_args).scale(sgn)
    return total


def leibniz_infty_check(
    tower: LeibnizTower, n_max: int, tuples: list[list[Cochain]] | None = None
) -> JacobiCounterexample | None:
    """Check the generalized Jacobi identities up to n_max.

    Defaults to all generator tuples of each length; extra argument tuples
    (e.g. random non-pure cochains) may be supplied explicitly.
    """
    M = tower.module
    if tuples is None:
        tuples = []
        for n in range(1, n_max + 1):
            for tup in itertools.product(M.generators(), repeat=n):
                tuples.append([Cochain.generator(M, *g) for g in tup])
    for args in tuples:
        if len(args) > n_max:
            continue
        residual = generalized_jacobi(tower, args)
        if not residual.is_zero():
            return JacobiCounterexample(len(args), args, residual)
    return None


@dataclass
class ModuleActionTower:
    """Tower on V[1] (+) W; tuples ending in W read off the actions S_k."""

    tower: LeibnizTower
    indexer: SumIndexer
    W: DgGModule

    def s_entry(self, v_gens: tuple[GenKey, ...], w_gen: GenKey) -> Cochain:
        n = len(v_gens) + 1
        key = tuple(self.indexer.inject_a(*g) for g in v_gens) + (
            self.indexer.inject_b(*w_gen),
        )
        if n == 1:
            raise ValueError("S_1 is the differential, not a table entry")
        return self.tower.tables[n].entry(key)


def module_actions(lp: LPModule, W: DgGModule, max_arity: int) -> ModuleActionTower:
    D, sidx = direct_sum(shift(lp.V, 1), W)

    def anchor(q: int, j: int) -> Cochain:
        part, i = sidx.split(q, j)
        if part == "a":
            return lp.alpha_of(q + 1, i)
        return Cochain(lp.g)

    return ModuleActionTower(LeibnizTower(D, anchor, max_arity), sidx, W)


def module_identity_check(
    lp: LPModule, W: DgGModule, n_max: int, max_arity: int | None = None
) -> JacobiCounterexample | None:
    """Generalized Jacobi on the sum module restricted to tuples whose last
    argument comes from W: exactly the Leibniz-infinity module axioms."""
    mt = module_actions(lp, W, max_arity or max(n_max, 2))
    D = mt.tower.module
    sidx = mt.indexer
    v_gens = [sidx.inject_a(q - 1, j) for (q, j) in lp.V.generators()]
    w_gens = [sidx.inject_b(q, j) for (q, j) in W.generators()]
    tuples = []
    for n in range(1, n_max + 1):
        for head in itertools.product(v_gens, repeat=n - 1):
            for tail in w_gens:
                tuples.append([Cochain.generator(D, *g) for g in head + (tail,)])
    return leibniz_infty_check(mt.tower, n_max, tuples)
