"""Total Chevalley-Eilenberg complexes of bounded dg modules.

Omega_g(V) = wedge(g^dual) (x) V with three differentials: the CE part d_ce
driven by the action, the internal part d_internal applying d^V with a
(-1)^(form degree) sign, and their sum d_tot.  Cochains are sparse maps
keyed by (strictly increasing wedge tuple, internal degree, basis index).

All Koszul signs are routed through sort_with_sign so there is a single
source of truth for permutation signs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .lie import GAction, LieAlgebra, check_action, trivial_action, adjoint_action
from .linalg import Matrix, Subspace, Vector, frac, image, kernel, rref, solve

Key = tuple[tuple[int, ...], int, int]


def sort_with_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...] | None]:
    """Sort indices, counting inversions; sign 0 on repeated indices."""
    items = list(seq)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return 0, None
    return sign, tuple(items)


class DgGModule:
    """Bounded complex of g-representations with commuting differential."""

    def __init__(
        self,
        L: LieAlgebra,
        degrees: dict[int, int],
        actions: dict[int, GAction],
        diff: dict[int, Matrix],
        basis_names: dict[int, list[str]] | None = None,
    ):
        self.L = L
        self.degrees = {q: d for q, d in degrees.items() if d > 0}
        self.actions = dict(actions)
        self.diff = dict(diff)
        self.basis_names = dict(basis_names or {})
        for q, d in self.degrees.items():
            a = self.actions.get(q)
            if a is None:
                self.actions[q] = trivial_action(L, d)
            elif a.dim_space != d:
                raise ValueError(f"action at degree {q} has wrong dimension")
        for q, m in self.diff.items():
            if m.cols != self.dim(q) or m.rows != self.dim(q + 1):
                raise ValueError(f"differential at degree {q} has wrong shape")

    def dim(self, q: int) -> int:
        return self.degrees.get(q, 0)

    @property
    def bot(self) -> int:
        return min(self.degrees) if self.degrees else 0

    @property
    def top(self) -> int:
        return max(self.degrees) if self.degrees else 0

    def action(self, q: int) -> GAction:
        return self.actions[q]

    def diff_at(self, q: int) -> Matrix:
        m = self.diff.get(q)
        if m is None:
            return Matrix.zeros(self.dim(q + 1), self.dim(q))
        return m

    def generators(self) -> list[tuple[int, int]]:
        return [(q, j) for q in sorted(self.degrees) for j in range(self.dim(q))]

    def name(self, q: int, j: int) -> str:
        names = self.basis_names.get(q)
        if names and j < len(names):
            return names[j]
        return f"v{q}_{j}"

    def validate(self) -> None:
        """Check d^2 = 0, equivariance of d, and the representation law."""
        for q in self.degrees:
            v = check_action(self.L, self.action(q))
            if v is not None:
                raise ValueError(f"action at degree {q} violates the bracket at {v.i},{v.j}")
        for q in self.degrees:
            dq = self.diff_at(q)
            d_next = self.diff_at(q + 1)
            if self.dim(q + 2) and not (d_next @ dq).is_zero():
                raise ValueError(f"d^2 != 0 at degree {q}")
            if self.dim(q + 1):
                for i in range(self.L.dim):
                    lhs = dq @ self.action(q).rho[i]
                    rhs = self.action(q + 1).rho[i] @ dq
                    if lhs != rhs:
                        raise ValueError(f"differential not equivariant at degree {q}, generator {i}")


class Cochain:
    """Sparse element of Omega_g(V)."""

    __slots__ = ("module", "terms")

    def __init__(self, module: DgGModule, terms: dict[Key, Fraction] | None = None):
        self.module = module
        self.terms: dict[Key, Fraction] = {}
        if terms:
            for key, coef in terms.items():
                coef = frac(coef)
                if coef != 0:
                    self.terms[key] = coef

    @staticmethod
    def generator(module: DgGModule, q: int, j: int) -> "Cochain":
        if not (0 <= j < module.dim(q)):
            raise ValueError("no such generator")
        return Cochain(module, {((), q, j): Fraction(1)})

    def add_term(self, key: Key, coef: Fraction) -> None:
        c = self.terms.get(key, Fraction(0)) + coef
        if c == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = c

    def __add__(self, other: "Cochain") -> "Cochain":
        out = Cochain(self.module, dict(self.terms))
        for key, coef in other.terms.items():
            out.add_term(key, coef)
        return out

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(-1)

    def __neg__(self) -> "Cochain":
        return self.scale(-1)

    def scale(self, s) -> "Cochain":
        s = frac(s)
        return Cochain(self.module, {k: s * c for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, Cochain) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("Cochain is not hashable")

    def total_degrees(self) -> set[int]:
        return {len(I) + q for (I, q, _) in self.terms}

    def degree(self) -> int:
        """Total degree of a homogeneous cochain."""
        degs = self.total_degrees()
        if len(degs) > 1:
            raise ValueError(f"cochain not homogeneous: degrees {sorted(degs)}")
        return degs.pop() if degs else 0

    def sorted_terms(self) -> list[tuple[Key, Fraction]]:
        return sorted(
            self.terms.items(), key=lambda kv: (len(kv[0][0]) + kv[0][1], kv[0][0], kv[0][1], kv[0][2])
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "Cochain(0)"
        bits = []
        for (I, q, j), coef in self.sorted_terms():
            form = "^".join(f"xi{a}" for a in I) or "1"
            bits.append(f"{coef}*{form}(x){self.module.name(q, j)}")
        return "Cochain(" + " + ".join(bits) + ")"


def zero_cochain(module: DgGModule) -> Cochain:
    return Cochain(module)


def d_ce(c: Cochain) -> Cochain:
    """CE differential: action term plus structure-constant term.

    On a generator v this is sum_i xi^i (x) (x_i |> v); on forms it extends
    as an odd derivation with d(xi^a) = -sum_{i<j} c^a_ij xi^i ^ xi^j.
    """
    V = c.module
    L = V.L
    n = L.dim
    out = Cochain(V)
    for (I, q, j), coef in c.terms.items():
        rho = V.action(q).rho
        for i in range(n):
            col = rho[i]
            for k in range(V.dim(q)):
                entry = col.data[k][j]
                if entry == 0:
                    continue
                sign, J = sort_with_sign((i,) + I)
                if sign:
                    out.add_term((J, q, k), coef * entry * sign)
        for pos, a in enumerate(I):
            rest = I[:pos] + I[pos + 1 :]
            pref = -1 if pos % 2 else 1
            for i in range(n):
                for jj in range(i + 1, n):
                    cc = L.c[i][jj][a]
                    if cc == 0:
                        continue
                    sign, J = sort_with_sign(I[:pos] + (i, jj) + I[pos + 1 :])
                    if sign:
                        out.add_term((J, q, j), coef * pref * (-cc) * sign)
    return out


def d_internal(c: Cochain) -> Cochain:
    """Internal differential with the (-1)^p twist on p-forms."""
    V = c.module
    out = Cochain(V)
    for (I, q, j), coef in c.terms.items():
        if V.dim(q + 1) == 0:
            continue
        d = V.diff_at(q)
        sign = -1 if len(I) % 2 else 1
        for k in range(V.dim(q + 1)):
            entry = d.data[k][j]
            if entry != 0:
                out.add_term((I, q + 1, k), coef * sign * entry)
    return out


def d_tot(c: Cochain) -> Cochain:
    return d_ce(c) + d_internal(c)


def wedge(a: Cochain, c: Cochain) -> Cochain:
    """Left multiplication by a pure-form cochain (internal part trivial)."""
    out = Cochain(c.module)
    for (I, qa, _), ca in a.terms.items():
        if qa != 0:
            raise ValueError("left factor must be a pure form")
        for (J, q, j), cc in c.terms.items():
            sign, K = sort_with_sign(I + J)
            if sign:
                out.add_term((K, q, j), ca * cc * sign)
    return out


def form(module: DgGModule, indices: Sequence[int], coef=1) -> Cochain:
    """The form coef * xi^{i_1} ^ ... ^ xi^{i_p} as a scalar-carrier cochain.

    The carrier is only used for wedge products, so the cochain lives over
    the degree-0 slot of whichever module is supplied; callers should use
    it exclusively as a left wedge factor.
    """
    sign, I = sort_with_sign(tuple(indices))
    c = Cochain(module)
    if sign:
        c.add_term((I, 0, 0), frac(coef) * sign)
    return c


def contract(x: Sequence, c: Cochain) -> Cochain:
    """Interior product with the algebra element of coordinates x."""
    out = Cochain(c.module)
    xs = [frac(t) for t in x]
    for (I, q, j), coef in c.terms.items():
        for pos, a in enumerate(I):
            if xs[a] == 0:
                continue
            sign = -1 if pos % 2 else 1
            out.add_term((I[:pos] + I[pos + 1 :], q, j), coef * xs[a] * sign)
    return out


def g_act(gval: Cochain, c: Cochain) -> Cochain:
    """Action of a g-valued cochain: (omega (x) y) |> (eta (x) w) = omega ^ eta (x) (y |> w).

    gval must live over a module concentrated in degree 0 whose basis
    matches the Lie algebra generators (e.g. the adjoint module).
    """
    V = c.module
    out = Cochain(V)
    for (I, qg, t), cg in gval.terms.items():
        if qg != 0:
            raise ValueError("g-valued cochain must have internal degree 0")
        for (J, q, j), cc in c.terms.items():
            rho = V.action(q).rho[t]
            for k in range(V.dim(q)):
                entry = rho.data[k][j]
                if entry == 0:
                    continue
                sign, K = sort_with_sign(I + J)
                if sign:
                    out.add_term((K, q, k), cg * cc * entry * sign)
    return out


def iota_g_valued(gval: Cochain, c: Cochain) -> Cochain:
    """Contraction with a form-valued algebra element: omega (x) y acts as omega ^ iota_y."""
    out = Cochain(c.module)
    n = c.module.L.dim
    for (I, qg, t), cg in gval.terms.items():
        if qg != 0:
            raise ValueError("g-valued cochain must have internal degree 0")
        unit = [Fraction(0)] * n
        unit[t] = Fraction(1)
        part = wedge(form(c.module, I, cg), contract(unit, c))
        out = out + part
    return out


# ---------------------------------------------------------------------------
# module builders


def trivial_module(L: LieAlgebra, degrees: dict[int, int] | None = None) -> DgGModule:
    degrees = degrees or {0: 1}
    names = {0: ["1"]} if degrees == {0: 1} else None
    return DgGModule(L, degrees, {}, {}, basis_names=names)


def g_module(L: LieAlgebra) -> DgGModule:
    """g itself in degree 0 with the adjoint action."""
    return DgGModule(
        L,
        {0: L.dim},
        {0: adjoint_action(L)},
        {},
        basis_names={0: list(L.basis_names)},
    )


def shift(V: DgGModule, s: int) -> DgGModule:
    """V[s] with (V[s])^k = V^(k+s); pure relabeling, no sign changes."""
    return DgGModule(
        V.L,
        {q - s: d for q, d in V.degrees.items()},
        {q - s: a for q, a in V.actions.items()},
        {q - s: m for q, m in V.diff.items()},
        basis_names={q - s: names for q, names in V.basis_names.items()},
    )


@dataclass(frozen=True)
class SumIndexer:
    a_dims: dict[int, int]
    b_dims: dict[int, int]

    def inject_a(self, q: int, i: int) -> tuple[int, int]:
        return q, i

    def inject_b(self, q: int, i: int) -> tuple[int, int]:
        return q, self.a_dims.get(q, 0) + i

    def split(self, q: int, idx: int) -> tuple[str, int]:
        da = self.a_dims.get(q, 0)
        if idx < da:
            return "a", idx
        return "b", idx - da


def direct_sum(A: DgGModule, B: DgGModule) -> tuple[DgGModule, SumIndexer]:
    if A.L is not B.L:
        raise ValueError("modules over different algebras")
    degrees = {}
    for q in set(A.degrees) | set(B.degrees):
        degrees[q] = A.dim(q) + B.dim(q)
    actions = {}
    diff = {}
    names = {}
    for q in degrees:
        da, db = A.dim(q), B.dim(q)
        rho = []
        for i in range(A.L.dim):
            m = Matrix(da + db, da + db)
            if da:
                ra = A.action(q).rho[i]
                for r in range(da):
                    for c in range(da):
                        m.data[r][c] = ra.data[r][c]
            if db:
                rb = B.action(q).rho[i]
                for r in range(db):
                    for c in range(db):
                        m.data[da + r][da + c] = rb.data[r][c]
            rho.append(m)
        actions[q] = GAction(da + db, tuple(rho))
        names[q] = [A.name(q, j) for j in range(da)] + [B.name(q, j) for j in range(db)]
        if degrees.get(q + 1, 0) or A.dim(q + 1) or B.dim(q + 1):
            rows = A.dim(q + 1) + B.dim(q + 1)
            if rows:
                d = Matrix(rows, da + db)
                dA, dB = A.diff_at(q), B.diff_at(q)
                for r in range(A.dim(q + 1)):
                    for c in range(da):
                        d.data[r][c] = dA.data[r][c]
                for r in range(B.dim(q + 1)):
                    for c in range(db):
                        d.data[A.dim(q + 1) + r][da + c] = dB.data[r][c]
                diff[q] = d
    return DgGModule(A.L, degrees, actions, diff, basis_names=names), SumIndexer(
        dict(A.degrees), dict(B.degrees)
    )


@dataclass(frozen=True)
class TensorIndexer:
    a_dims: dict[int, int]
    b_dims: dict[int, int]
    # offsets[s][qa] = starting index of the A^qa (x) B^(s-qa) block
    offsets: dict[int, dict[int, int]]

    def index(self, qa: int, ia: int, qb: int, ib: int) -> tuple[int, int]:
        s = qa + qb
        base = self.offsets[s][qa]
        return s, base + ia * self.b_dims[qb] + ib

    def split(self, s: int, idx: int) -> tuple[int, int, int, int]:
        for qa in sorted(self.offsets[s], reverse=True):
            base = self.offsets[s][qa]
            if idx >= base:
                db = self.b_dims[s - qa]
                off = idx - base
                return qa, off // db, s - qa, off % db
        raise IndexError("bad tensor index")


def tensor_module(A: DgGModule, B: DgGModule) -> tuple[DgGModule, TensorIndexer]:
    """A (x) B with d = d_A (x) 1 + (-1)^a 1 (x) d_B and diagonal action."""
    L = A.L
    offsets: dict[int, dict[int, int]] = {}
    degrees: dict[int, int] = {}
    for qa in sorted(A.degrees):
        for qb in sorted(B.degrees):
            s = qa + qb
            off = degrees.get(s, 0)
            offsets.setdefault(s, {})[qa] = off
            degrees[s] = off + A.dim(qa) * B.dim(qb)
    idx = TensorIndexer(dict(A.degrees), dict(B.degrees), offsets)
    actions = {}
    diff = {}
    for s, dim_s in degrees.items():
        rho = [Matrix(dim_s, dim_s) for _ in range(L.dim)]
        for qa in offsets[s]:
            qb = s - qa
            ra = A.action(qa).rho
            rb = B.action(qb).rho
            for i in range(L.dim):
                for ia in range(A.dim(qa)):
                    for ib in range(B.dim(qb)):
                        _, col = idx.index(qa, ia, qb, ib)
                        for ia2 in range(A.dim(qa)):
                            if ra[i].data[ia2][ia] != 0:
                                _, row = idx.index(qa, ia2, qb, ib)
                                rho[i].data[row][col] += ra[i].data[ia2][ia]
                        for ib2 in range(B.dim(qb)):
                            if rb[i].data[ib2][ib] != 0:
                                _, row = idx.index(qa, ia, qb, ib2)
                                rho[i].data[row][col] += rb[i].data[ib2][ib]
        actions[s] = GAction(dim_s, tuple(rho))
        if degrees.get(s + 1, 0):
            d = Matrix(degrees[s + 1], dim_s)
            for qa in offsets[s]:
                qb = s - qa
                dA = A.diff_at(qa)
                dB = B.diff_at(qb)
                sgn = -1 if qa % 2 else 1
                for ia in range(A.dim(qa)):
                    for ib in range(B.dim(qb)):
                        _, col = idx.index(qa, ia, qb, ib)
                        for ia2 in range(A.dim(qa + 1)):
                            if dA.data[ia2][ia] != 0:
                                _, row = idx.index(qa + 1, ia2, qb, ib)
                                d.data[row][col] += dA.data[ia2][ia]
                        for ib2 in range(B.dim(qb + 1)):
                            if dB.data[ib2][ib] != 0:
                                _, row = idx.index(qa, ia, qb + 1, ib2)
                                d.data[row][col] += sgn * dB.data[ib2][ib]
            diff[s] = d
    return DgGModule(L, degrees, actions, diff), idx


@dataclass(frozen=True)
class HomIndexer:
    a_dims: dict[int, int]
    b_dims: dict[int, int]
    # offsets[r][s] = start of the Hom(A^s, B^(s+r)) block inside degree r
    offsets: dict[int, dict[int, int]]

    def index(self, r: int, s: int, a: int, b: int) -> tuple[int, int]:
        base = self.offsets[r][s]
        return r, base + a * self.b_dims[s + r] + b

    def split(self, r: int, idx: int) -> tuple[int, int, int]:
        for s in sorted(self.offsets[r], reverse=True):
            base = self.offsets[r][s]
            if idx >= base:
                db = self.b_dims[s + r]
                off = idx - base
                return s, off // db, off % db
        raise IndexError("bad hom index")


def hom_module(A: DgGModule, B: DgGModule) -> tuple[DgGModule, HomIndexer]:
    """Hom(A, B) with (x |> phi) = rho_B phi - phi rho_A and
    d(phi) = d_B phi - (-1)^r phi d_A in degree r."""
    L = A.L
    offsets: dict[int, dict[int, int]] = {}
    degrees: dict[int, int] = {}
    for s in sorted(A.degrees):
        for t in sorted(B.degrees):
            r = t - s
            off = degrees.get(r, 0)
            offsets.setdefault(r, {})[s] = off
            degrees[r] = off + A.dim(s) * B.dim(t)
    idx = HomIndexer(dict(A.degrees), dict(B.degrees), offsets)
    actions = {}
    diff = {}
    for r, dim_r in degrees.items():
        rho = [Matrix(dim_r, dim_r) for _ in range(L.dim)]
        for s in offsets[r]:
            t = s + r
            ra = A.action(s).rho
            rb = B.action(t).rho
            for i in range(L.dim):
                for a in range(A.dim(s)):
                    for b in range(B.dim(t)):
                        _, col = idx.index(r, s, a, b)
                        for b2 in range(B.dim(t)):
                            if rb[i].data[b2][b] != 0:
                                _, row = idx.index(r, s, a, b2)
                                rho[i].data[row][col] += rb[i].data[b2][b]
                        for a2 in range(A.dim(s)):
                            # phi moves to the source slot: (x|>phi)(v) -= phi(x|>v)
                            if ra[i].data[a][a2] != 0:
                                _, row = idx.index(r, s, a2, b)
                                rho[i].data[row][col] -= ra[i].data[a][a2]
        actions[r] = GAction(dim_r, tuple(rho))
        if degrees.get(r + 1, 0):
            d = Matrix(degrees[r + 1], dim_r)
            sgn = -1 if r % 2 else 1
            for s in offsets[r]:
                t = s + r
                dB = B.diff_at(t)
                for a in range(A.dim(s)):
                    for b in range(B.dim(t)):
                        _, col = idx.index(r, s, a, b)
                        for b2 in range(B.dim(t + 1)):
                            if dB.data[b2][b] != 0:
                                _, row = idx.index(r + 1, s, a, b2)
                                d.data[row][col] += dB.data[b2][b]
                        if A.dim(s - 1):
                            dA = A.diff_at(s - 1)
                            for a2 in range(A.dim(s - 1)):
                                if dA.data[a][a2] != 0:
                                    _, row = idx.index(r + 1, s - 1, a2, b)
                                    d.data[row][col] -= sgn * dA.data[a][a2]
            diff[r] = d
    return DgGModule(L, degrees, actions, diff), idx


def dual_module(V: DgGModule) -> tuple[DgGModule, HomIndexer]:
    return hom_module(V, trivial_module(V.L))


# ---------------------------------------------------------------------------
# total complex as plain matrices, and total cohomology


def omega_keys(V: DgGModule, n: int) -> list[Key]:
    """Canonical ordered basis of the degree-n part of Omega_g(V)."""
    ng = V.L.dim
    keys = []
    for q in sorted(V.degrees):
        p = n - q
        if 0 <= p <= ng:
            for I in itertools.combinations(range(ng), p):
                for j in range(V.dim(q)):
                    keys.append((I, q, j))
    return keys


def cochain_to_vector(c: Cochain, keys: list[Key]) -> Vector:
    index = {k: i for i, k in enumerate(keys)}
    out = [Fraction(0)] * len(keys)
    for key, coef in c.terms.items():
        out[index[key]] += coef
    return out


def vector_to_cochain(V: DgGModule, keys: list[Key], vec: Sequence) -> Cochain:
    return Cochain(V, {k: frac(v) for k, v in zip(keys, vec)})


def dtot_matrix(V: DgGModule, n: int) -> tuple[Matrix, list[Key], list[Key]]:
    """Matrix of d_tot from total degree n to n+1 in the canonical bases."""
    src = omega_keys(V, n)
    dst = omega_keys(V, n + 1)
    m = Matrix(len(dst), len(src))
    dst_index = {k: i for i, k in enumerate(dst)}
    for col, key in enumerate(src):
        img = d_tot(Cochain(V, {key: Fraction(1)}))
        for k2, coef in img.terms.items():
            m.data[dst_index[k2]][col] = coef
    return m, src, dst


@dataclass
class CohomologySummary:
    degree: int
    dim: int
    representatives: list[Cochain]
    keys: list[Key]
    _basis_matrix: Matrix = field(repr=False)
    _img_dim: int = field(repr=False)

    def project(self, c: Cochain) -> Vector:
        """Class coordinates of a closed cochain in the representative basis."""
        vec = cochain_to_vector(c, self.keys)
        x = solve(self._basis_matrix, vec)
        if x is None:
            raise ValueError("cochain is not closed")
        return x[self._img_dim :]


def total_cohomology(V: DgGModule) -> dict[int, CohomologySummary]:
    """H^n_tot(g, V) for every total degree n with nonzero cochain space."""
    ng = V.L.dim
    lo = V.bot
    hi = V.top + ng
    out: dict[int, CohomologySummary] = {}
    mats = {}
    for n in range(lo - 1, hi + 1):
        mats[n] = dtot_matrix(V, n)
    for n in range(lo, hi + 1):
        D, src, _ = mats[n]
        if not src:
            continue
        Dprev, prev_src, _ = mats[n - 1]
        ker_basis = kernel(D).basis
        img_basis = image(Dprev).basis if prev_src else []
        cols = [list(v) for v in img_basis] + [list(v) for v in ker_basis]
        reps = []
        if cols:
            joint = Matrix.from_columns(cols)
            _, pivots = rref(joint)
            for p in pivots:
                if p >= len(img_basis):
                    reps.append(ker_basis[p - len(img_basis)])
        basis_matrix = Matrix.from_columns([list(v) for v in img_basis] + [list(v) for v in reps])
        if basis_matrix.cols == 0:
            basis_matrix = Matrix(len(src), 0)
        out[n] = CohomologySummary(
            degree=n,
            dim=len(reps),
            representatives=[vector_to_cochain(V, src, v) for v in reps],
            keys=src,
            _basis_matrix=basis_matrix,
            _img_dim=len(img_basis),
        )
    return out
