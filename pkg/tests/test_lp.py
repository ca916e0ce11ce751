import random
from fractions import Fraction

import pytest

from dglp.complexes import DgGModule, d_tot
from dglp.corpus import (
    abelian,
    algebra_catalog,
    random_action,
    random_ordinary_lp,
    random_resolution,
)
from dglp.lie import GAction, adjoint_action, sl2, trivial_action
from dglp.linalg import Matrix, frac
from dglp.liepair import build_pair_lp, builtin_sl2, pair_module
from dglp.lp import (
    LPModule,
    NotInvariant,
    OrdinaryLP,
    abelian_extension_equiv,
    as_weak_morphism,
    from_invariant_pairing,
    from_weak_morphism,
    lift_lp,
    lp_homotopic,
    ordinary_as_lp,
    to_cocycle,
    verify_lp,
)
from dglp.morphisms import check_weak
from conftest import random_lps


def lp_is_valid_three_ways(lp):
    eq = verify_lp(lp) is None
    wm = check_weak(as_weak_morphism(lp)) is None
    c, H, _ = to_cocycle(lp)
    cc = d_tot(c).is_zero()
    assert eq == wm == cc
    return eq


class TestThreeDescriptions:
    def test_valid_random_structures_agree(self):
        for lp in random_lps(10, seed=31):
            assert lp_is_valid_three_ways(lp)

    def test_perturbed_structures_agree_on_failure(self):
        rng = random.Random(32)
        seen_invalid = 0
        for lp in random_lps(10, seed=33):
            alpha = dict(lp.alpha)
            k = rng.choice(sorted(lp.V.degrees))
            if k > lp.u:
                k = 0
            m = lp.alpha.get(k)
            rows = (
                m.rows
                if m is not None
                else len(__import__("dglp.morphisms", fromlist=["wedge_tuples"]).wedge_tuples(lp.V.L.dim, k))
                * lp.V.L.dim
            )
            pert = m.copy() if m is not None else Matrix.zeros(rows, lp.V.dim(k))
            pert.data[rng.randrange(pert.rows)][rng.randrange(pert.cols)] += Fraction(1)
            lp2 = LPModule(lp.V, {**alpha, k: pert})
            if not lp_is_valid_three_ways(lp2):
                seen_invalid += 1
        assert seen_invalid >= 5

    def test_round_trip_through_weak_morphism(self):
        for lp in random_lps(5, seed=34):
            back = from_weak_morphism(as_weak_morphism(lp))
            assert back.alpha == lp.alpha

    def test_from_weak_morphism_rejects_off_diagonal(self):
        p, _ = builtin_sl2()
        lp = build_pair_lp(p)
        f = as_weak_morphism(lp)
        comps = dict(f.components)
        # a (1, 0) component lands in g at internal degree 1, which is absent
        from dglp.morphisms import WeakMorphism

        bad = WeakMorphism(lp.V, lp.g, comps)
        bad.components[(2, 1)] = Matrix.zeros(0, 0)
        # constructing an off-diagonal nonzero component must be rejected
        with pytest.raises(ValueError):
            g1 = Matrix.zeros(2 * 2, lp.V.dim(1))
            g1.data[0][0] = Fraction(1)
            from_weak_morphism(WeakMorphism(lp.V, lp.g, {**comps, (1, 0): g1}))


class TestPairStructure:
    def test_sl2_alpha_values(self):
        p, _ = builtin_sl2()
        lp = build_pair_lp(p)
        # alpha_0 is the projection onto span{h, e} along f
        assert lp.alpha[0] == Matrix.from_rows([[1, 0, 0], [0, 1, 0]])
        # alpha_1(b) = e-dual (x) (-h): only [j(b), e] = [f, e] = -h survives
        a1 = lp.alpha[1]
        expected = Matrix.zeros(4, 1)
        expected.data[2][0] = Fraction(-1)  # wedge index 1 (e-dual), g index 0 (h)
        assert a1 == expected
        assert verify_lp(lp) is None

    def test_sign_flip_breaks_structure_at_degree_zero(self):
        p, _ = builtin_sl2()
        lp = build_pair_lp(p)
        bad = LPModule(lp.V, {0: lp.alpha[0].scale(-1), 1: lp.alpha[1]})
        v = verify_lp(bad)
        assert v is not None and v.k == 0

    def test_catalog_pairs_verify(self):
        from dglp.corpus import pair_catalog

        for p in pair_catalog():
            assert verify_lp(build_pair_lp(p)) is None


class TestOrdinary:
    def test_adjoint_identity_is_equivariant(self):
        L = sl2()
        ord_lp = OrdinaryLP(L, adjoint_action(L), Matrix.identity(3))
        assert ord_lp.check() is None
        assert verify_lp(ordinary_as_lp(ord_lp)) is None

    def test_non_equivariant_detected(self):
        L = sl2()
        X = Matrix.from_rows([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
        ord_lp = OrdinaryLP(L, adjoint_action(L), X)
        assert ord_lp.check() is not None

    def test_degree_zero_lp_is_ordinary_condition(self):
        # for V concentrated in degree 0 the structure equation reduces to
        # equivariance of alpha_0
        rng = random.Random(35)
        for _ in range(10):
            L = rng.choice(algebra_catalog())
            ord_lp = random_ordinary_lp(L, rng)
            assert ord_lp.check() is None
            assert verify_lp(ordinary_as_lp(ord_lp)) is None


class TestInvariantPairing:
    def test_zero_pairing_gives_zero_alpha(self):
        lp = from_invariant_pairing(sl2(), Matrix.zeros(3, 3))
        assert lp.alpha == {}
        assert verify_lp(lp) is None

    def test_abelian_pairing_is_raw(self):
        L = abelian(2)
        pairing = Matrix.from_rows([[1, 0], [0, 2]])
        lp = from_invariant_pairing(L, pairing)
        # raw assignment: alpha_1(x_i (x) x_j) = <x_i, x_i> xi^i (x) x_j
        m = lp.alpha[1]
        assert m.data[0 * 2 + 0][0 * 2 + 0] == 1
        assert m.data[1 * 2 + 1][1 * 2 + 1] == 2
        assert verify_lp(lp) is None

    def test_sl2_killing_form_verifies(self):
        pairing = Matrix.from_rows([[8, 0, 0], [0, 0, 4], [0, 4, 0]])
        lp = from_invariant_pairing(sl2(), pairing)
        assert verify_lp(lp) is None
        assert lp.alpha[1].rows == 9 and lp.alpha[1].cols == 9

    def test_sl2_raw_assignment_alone_fails(self):
        # the uncorrected formula violates the structure equation, which is
        # why the constructor applies the deterministic correction
        L = sl2()
        pairing = Matrix.from_rows([[8, 0, 0], [0, 0, 4], [0, 4, 0]])
        n = 3
        raw = Matrix.zeros(9, 9)
        for i in range(n):
            for j in range(n):
                for a in range(n):
                    raw.data[a * n + j][i * n + j] += pairing.data[i][a]
        ad = adjoint_action(L)
        from dglp.lie import tensor_action

        V = DgGModule(L, {1: 9}, {1: tensor_action(ad, ad)}, {})
        assert verify_lp(LPModule(V, {1: raw})) is not None

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            from_invariant_pairing(sl2(), Matrix.from_rows([[0, 1, 0], [0, 0, 0], [0, 0, 0]]))

    def test_not_invariant_rejected(self):
        with pytest.raises(NotInvariant):
            from_invariant_pairing(sl2(), Matrix.identity(3))


class TestLifting:
    def lift_cases(self, count, seed):
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

    def test_lift_produces_valid_structures(self):
        for ord_lp, V, iso in self.lift_cases(8, seed=36):
            lp = lift_lp(ord_lp, V, iso)
            assert verify_lp(lp) is None
            # degree-0 component restricted to ker d agrees with X
            from dglp.linalg import kernel

            K = kernel(V.diff_at(0))
            assert lp.alpha[0] @ K.matrix() == ord_lp.X @ iso

    def test_two_lifts_are_homotopic(self):
        for ord_lp, V, iso in self.lift_cases(5, seed=37):
            lp = lift_lp(ord_lp, V, iso)
            lp2 = lift_lp(ord_lp, V, iso, rng=random.Random(5))
            h = lp_homotopic(lp, lp2)
            assert h is not None

    def test_homotopic_requires_shared_module(self):
        cases = self.lift_cases(2, seed=38)
        lp = lift_lp(*cases[0][:3])
        other = lift_lp(*cases[1][:3])
        with pytest.raises(ValueError):
            lp_homotopic(lp, other)

    def test_lift_rejects_non_equivariant(self):
        from dglp.morphisms import NotEquivariant

        L = sl2()
        ord_lp = OrdinaryLP(L, adjoint_action(L), Matrix.from_rows([[1, 1, 0], [0, 1, 0], [0, 0, 1]]))
        V, iso = random_resolution(L, adjoint_action(L), random.Random(1))
        with pytest.raises(NotEquivariant):
            lift_lp(ord_lp, V, iso)


class TestAbelianExtensionEquivalence:
    def test_zero_alpha(self):
        L = sl2()
        a = trivial_action(L, 2)
        assert abelian_extension_equiv(L, a, Matrix.zeros(3 * 3, 2)) == (True, True)

    def test_abelian_trivial_always_valid(self):
        L = abelian(3)
        a = trivial_action(L, 1)
        rng = random.Random(39)
        for _ in range(10):
            alpha2 = Matrix.zeros(9, 1)
            for r in range(9):
                alpha2.data[r][0] = Fraction(rng.randint(-2, 2))
            assert abelian_extension_equiv(L, a, alpha2) == (True, True)

    def test_random_sweep_conditions_coincide(self):
        rng = random.Random(40)
        valid = invalid = 0
        for _ in range(50):
            L = rng.choice([A for A in algebra_catalog() if A.dim >= 2])
            a = random_action(L, rng)
            n = L.dim
            rows = len(
                __import__("dglp.morphisms", fromlist=["wedge_tuples"]).wedge_tuples(n, 2)
            ) * n
            alpha2 = Matrix.zeros(rows, a.dim_space)
            for r in range(rows):
                for c in range(a.dim_space):
                    alpha2.data[r][c] = Fraction(rng.randint(-1, 1))
            lp_ok, co_ok = abelian_extension_equiv(L, a, alpha2)
            assert lp_ok == co_ok
            valid += lp_ok
            invalid += not lp_ok
        assert valid and invalid
