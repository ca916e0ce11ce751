"""Acceptance gate: nine end-to-end criteria, one pass/fail line each.

Each criterion prints a single `[PASS]`/`[FAIL]` line (visible with -s or in
the failure report) and enforces its runtime budget where one is stated.
"""

import itertools
import random
import time
from fractions import Fraction

from dglp.atiyah import (
    atiyah_cocycle,
    check_cocycle,
    class_equal,
    encode_table,
    hom_context,
    leibniz_on_cohomology,
)
from dglp.complexes import (
    Cochain,
    d_ce,
    d_internal,
    d_tot,
    g_module,
    omega_keys,
    shift,
    total_cohomology,
    trivial_module,
)
from dglp.corpus import (
    algebra_catalog,
    nonabelian2,
    pair_catalog,
    random_action,
    random_module,
    random_ordinary_lp,
    random_resolution,
    random_splitting,
)
from dglp.kapranov import kapranov_recursion_check, kapranov_tower, leibniz_infty_check
from dglp.lie import adjoint_action, sl2
from dglp.linalg import Matrix, frac, kernel
from dglp.liepair import build_pair_lp, builtin_sl2, pair_module, splitting_homotopy
from dglp.lp import (
    OrdinaryLP,
    abelian_extension_equiv,
    lift_lp,
    lp_homotopic,
    ordinary_as_lp,
    verify_lp,
)
from dglp.morphisms import wedge_tuples
from dglp.problemfile import builtin_sl2_killing, ProblemContext
from conftest import random_lps, random_modules


def report(num: int, name: str, ok: bool) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {name}")
    assert ok, f"criterion {num} ({name}) failed"


def killing_lp():
    ctx = ProblemContext(builtin_sl2_killing())
    return ctx.lp


def sparse_random_tuples(M, n_max, seed, count):
    """Homogeneous random cochains with a handful of terms each."""
    rng = random.Random(seed)
    degs = sorted({q for q in range(M.bot, M.top + M.L.dim + 1) if omega_keys(M, q)})
    tuples = []
    for _ in range(count):
        n = rng.randint(1, n_max)
        args = []
        for _ in range(n):
            d = rng.choice(degs)
            keys = omega_keys(M, d)
            c = Cochain(M)
            for key in rng.sample(keys, min(len(keys), rng.randint(1, 3))):
                v = rng.randint(-2, 2)
                if v:
                    c.add_term(key, Fraction(v))
            args.append(c)
        tuples.append(args)
    return tuples


def test_criterion_1_sl2_golden_values():
    t0 = time.monotonic()
    p, golden = builtin_sl2()
    lp = build_pair_lp(p)
    V = lp.V
    ok = True
    for (q, j), expected in golden["d_tot"].items():
        ok &= d_tot(Cochain.generator(V, q, j)).terms == expected
    triv = trivial_module(p.sub)
    from dglp.complexes import form

    for (i,), expected in golden["d_form"].items():
        ok &= d_ce(form(triv, (i,), frac(1))).terms == expected
    tower = kapranov_tower(lp, 4)
    for tup, expected in golden["r2"].items():
        ok &= tower.tables[2].entry(tup).terms == expected
    for tup, expected in golden["r3"].items():
        ok &= tower.tables[3].entry(tup).terms == expected
    # every remaining ternary entry vanishes except the one the ternary
    # Leibniz identity forces: R3(e, b, b) = -2 b
    extras = {
        tup: c.terms
        for tup, c in tower.tables[3].entries.items()
        if tup not in golden["r3"]
    }
    ok &= extras == golden["r3_extra"]
    ok &= tower.tables[4].entries == {}
    elapsed = time.monotonic() - t0
    ok &= elapsed < 1.0
    report(1, "sl2 golden reproduction", ok)


def test_criterion_2_complex_axioms():
    t0 = time.monotonic()
    p, _ = builtin_sl2()
    mods = [pair_module(p), killing_lp().V] + random_modules(20, seed=101)
    ok = True
    for V in mods:
        for n in range(V.bot, V.top + V.L.dim + 1):
            for key in omega_keys(V, n):
                c = Cochain(V)
                c.add_term(key, frac(1))
                ok &= d_ce(d_ce(c)).is_zero()
                ok &= d_internal(d_internal(c)).is_zero()
                ok &= (d_internal(d_ce(c)) + d_ce(d_internal(c))).is_zero()
                ok &= d_tot(d_tot(c)).is_zero()
    elapsed = time.monotonic() - t0
    ok &= elapsed < 10.0
    report(2, "complex axioms on all fixtures", ok)


def test_criterion_3_leibniz_identities():
    t0 = time.monotonic()
    p, _ = builtin_sl2()
    fixtures = [build_pair_lp(p), killing_lp()] + random_lps(10, seed=102)
    ok = True
    for i, lp in enumerate(fixtures):
        tower = kapranov_tower(lp, 4)
        ok &= leibniz_infty_check(tower, 4) is None
        extra = sparse_random_tuples(tower.module, 4, 103 + i, 100)
        ok &= leibniz_infty_check(tower, 4, extra) is None
    elapsed = time.monotonic() - t0
    ok &= elapsed < 60.0
    report(3, "generalized Jacobi identities n<=4", ok)


def test_criterion_4_recursion_matches_closed_form():
    p, _ = builtin_sl2()
    fixtures = [build_pair_lp(p), killing_lp()] + random_lps(10, seed=104)
    ok = all(kapranov_recursion_check(lp, 5) is None for lp in fixtures)
    report(4, "bracket recursion equals closed form up to arity 5", ok)


def lift_instances(count, seed):
    out = []
    s = 0
    while len(out) < count:
        r = random.Random(seed * 10_000 + s)
        s += 1
        L = r.choice(algebra_catalog())
        ord_lp = random_ordinary_lp(L, r)
        try:
            V, iso = random_resolution(L, ord_lp.G, r, r.random() < 0.5)
        except RuntimeError:
            continue
        out.append((ord_lp, V, iso))
    return out


def test_criterion_5_lifting_theorem():
    t0 = time.monotonic()
    ok = True
    for ord_lp, V, iso in lift_instances(10, seed=105):
        lp = lift_lp(ord_lp, V, iso)
        ok &= verify_lp(lp) is None
        K = kernel(V.diff_at(0))
        a0 = lp.alpha.get(0, Matrix.zeros(V.L.dim, V.dim(0)))
        ok &= a0 @ K.matrix() == ord_lp.X @ iso
        lp2 = lift_lp(ord_lp, V, iso, rng=random.Random(9))
        ok &= lp_homotopic(lp, lp2) is not None
    elapsed = time.monotonic() - t0
    ok &= elapsed < 30.0
    report(5, "lifting with homotopy uniqueness", ok)


def test_criterion_6_atiyah_cocycle():
    ok = True
    p, _ = builtin_sl2()
    lp_pair = build_pair_lp(p)
    fixtures = [lp_pair, killing_lp()] + random_lps(5, seed=106)
    for lp in fixtures:
        for W in (shift(lp.V, 1), g_module(lp.V.L)):
            ok &= check_cocycle(atiyah_cocycle(lp, W)) is None
    # ordinary specialization: the only entry is -X(g) |> g'
    L = sl2()
    X = Matrix.identity(3)
    lp_ord = ordinary_as_lp(OrdinaryLP(L, adjoint_action(L), X))
    W = g_module(L)
    at = atiyah_cocycle(lp_ord, W)
    for j in range(3):
        for m in range(3):
            ej = [Fraction(1) if t == j else Fraction(0) for t in range(3)]
            em = [Fraction(1) if t == m else Fraction(0) for t in range(3)]
            expected = {
                ((), 0, t): -v for t, v in enumerate(L.bracket(ej, em)) if v != 0
            }
            ok &= at.entry(0, j, 0, m).terms == expected
    # two splittings of the pair give the same class, with explicit primitive
    from dglp.liepair import with_splitting

    p2 = with_splitting(p, Matrix.from_rows([[1], [0], [1]]))
    lp2 = build_pair_lp(p2, V=lp_pair.V)
    Wp = shift(lp_pair.V, 1)
    ctx = hom_context(lp_pair, Wp)
    at1 = atiyah_cocycle(lp_pair, Wp)
    at2 = atiyah_cocycle(lp2, Wp)
    prim = class_equal(at1, at2, ctx)
    ok &= prim is not None
    if prim is not None:
        ok &= (d_tot(prim) - (encode_table(ctx, at2) - encode_table(ctx, at1))).is_zero()
    report(6, "Atiyah cocycle closedness and class invariance", ok)


def test_criterion_7_splitting_independence():
    ok = True
    rng = random.Random(107)
    p, _ = builtin_sl2()
    cases = [p]
    while len(cases) < 6:
        q = rng.choice(pair_catalog())
        if q.q_dim:
            cases.append(q)
    for pr in cases:
        p2 = random_splitting(pr, rng)
        lp = build_pair_lp(pr)
        lp2 = build_pair_lp(p2, V=lp.V)
        # raises VerificationFailure unless the analytic witness verifies
        splitting_homotopy(pr, p2, lp, lp2)
        ok &= lp_homotopic(lp, lp2) is not None
    report(7, "splitting independence with analytic witness", ok)


def test_criterion_8_degree2_equivalence():
    rng = random.Random(108)
    ok = True
    valid = 0
    for i in range(50):
        L = sl2() if i % 2 == 0 else nonabelian2()
        a = random_action(L, rng)
        n = L.dim
        rows = len(wedge_tuples(n, 2)) * n
        alpha2 = Matrix.zeros(rows, a.dim_space)
        for r in range(rows):
            for c in range(a.dim_space):
                alpha2.data[r][c] = Fraction(rng.randint(-1, 1))
        lp_ok, co_ok = abelian_extension_equiv(L, a, alpha2)
        ok &= lp_ok == co_ok
        valid += lp_ok
    ok &= valid > 0  # the sweep exercised both outcomes
    report(8, "degree-2 structures match CE 2-cocycles", ok)


def test_criterion_9_cohomology_leibniz():
    ok = True
    p, _ = builtin_sl2()
    fixtures = [build_pair_lp(p), killing_lp()] + random_lps(5, seed=109)
    for lp in fixtures:
        coh = total_cohomology(lp.V)
        if sum(s.dim for s in coh.values()) > 12:
            continue
        action = leibniz_on_cohomology(lp)
        classes = [(n, i) for n, s in sorted(coh.items()) for i in range(s.dim)]
        for a, b, c in itertools.product(classes, repeat=3):
            ra = coh[a[0]].representatives[a[1]]
            rb = coh[b[0]].representatives[b[1]]
            rc = coh[c[0]].representatives[c[1]]
            lhs = action.act_cochain(ra, action.act_cochain(rb, rc))
            rhs = action.act_cochain(action.act_cochain(ra, rb), rc)
            sgn = -1 if (a[0] % 2 and b[0] % 2) else 1
            rhs = rhs + action.act_cochain(rb, action.act_cochain(ra, rc)).scale(sgn)
            diff = lhs - rhs
            deg = a[0] + b[0] + c[0]
            if deg in coh:
                ok &= all(x == 0 for x in coh[deg].project(diff))
            else:
                ok &= diff.is_zero()
    report(9, "left Leibniz identity on total cohomology", ok)
