"""JSON problem files: schema, exact-rational (de)serialization, canonical
dumps, and the built-in fixtures.

Rationals are accepted as integers, "p/q" strings, or [num, den] pairs;
canonical output always uses the string form (str of Fraction, so "3" or
"3/2").  Structure constants are listed for i < j only and completed by
antisymmetry on load.  Matrix rows for alpha components are indexed by
(wedge tuple in lexicographic order, algebra basis index), the same
convention used across the package.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional, Union

from pydantic import BaseModel, Field

from .complexes import Cochain, DgGModule
from .lie import GAction, LieAlgebra, lie_from_pairs
from .linalg import Matrix, frac
from .liepair import LiePair, build_pair_lp, new_lie_pair, pair_module
from .lp import LPModule, OrdinaryLP, from_invariant_pairing

Rational = Union[int, str, list[int]]
MatrixData = list[list[Rational]]


def parse_rational(x: Rational) -> Fraction:
    if isinstance(x, list):
        if len(x) != 2:
            raise ValueError(f"rational pair must have two entries, got {x}")
        return Fraction(x[0], x[1])
    return frac(x)


def dump_rational(x: Fraction) -> str:
    return str(Fraction(x))


def parse_matrix(data: MatrixData) -> Matrix:
    rows = [[parse_rational(x) for x in row] for row in data]
    return Matrix.from_rows(rows) if rows else Matrix(0, 0)


def dump_matrix(m: Matrix) -> list[list[str]]:
    return [[dump_rational(x) for x in row] for row in m.data]


class LieAlgebraSpec(BaseModel):
    dim: int
    basis: list[str]
    structure_constants: list[list[Rational]] = Field(default_factory=list)


class ModuleSpec(BaseModel):
    degrees: dict[str, int]
    actions: dict[str, list[MatrixData]] = Field(default_factory=dict)
    differentials: dict[str, MatrixData] = Field(default_factory=dict)
    basis_names: dict[str, list[str]] = Field(default_factory=dict)


class AlphaSpec(BaseModel):
    module: str
    components: dict[str, MatrixData]


class LiePairSpec(BaseModel):
    subalgebra_basis: list[int]
    splitting: Optional[MatrixData] = None
    quotient_names: Optional[list[str]] = None


class OrdinaryLPSpec(BaseModel):
    action: list[MatrixData]
    x: MatrixData
    resolution: str
    kernel_iso: MatrixData


class ProblemFile(BaseModel):
    schema_version: int = 1
    lie_algebra: LieAlgebraSpec
    modules: dict[str, ModuleSpec] = Field(default_factory=dict)
    alpha: Optional[AlphaSpec] = None
    lie_pair: Optional[LiePairSpec] = None
    ordinary_lp: Optional[OrdinaryLPSpec] = None


class ProblemError(ValueError):
    pass


def build_algebra(spec: LieAlgebraSpec) -> LieAlgebra:
    if len(spec.basis) != spec.dim:
        raise ProblemError("basis name count must match dim")
    brackets: dict[tuple[int, int], list[Fraction]] = {}
    for entry in spec.structure_constants:
        if len(entry) != 5:
            raise ProblemError(f"structure constant entry must be [i,j,k,num,den]: {entry}")
        i, j, k = int(entry[0]), int(entry[1]), int(entry[2])
        if not i < j:
            raise ProblemError(f"structure constants must be listed with i < j: {entry}")
        if not (0 <= k < spec.dim and 0 <= i and j < spec.dim):
            raise ProblemError(f"structure constant indices out of range: {entry}")
        v = brackets.setdefault((i, j), [Fraction(0)] * spec.dim)
        v[k] += Fraction(int(entry[3]), int(entry[4]))
    return lie_from_pairs(spec.basis, brackets)


def dump_algebra(L: LieAlgebra) -> LieAlgebraSpec:
    sc = []
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            for k in range(L.dim):
                c = L.c[i][j][k]
                if c != 0:
                    sc.append([i, j, k, c.numerator, c.denominator])
    return LieAlgebraSpec(dim=L.dim, basis=list(L.basis_names), structure_constants=sc)


def build_module(L: LieAlgebra, spec: ModuleSpec) -> DgGModule:
    degrees = {int(q): d for q, d in spec.degrees.items()}
    actions = {}
    for q, mats in spec.actions.items():
        qi = int(q)
        if len(mats) != L.dim:
            raise ProblemError(f"module action at degree {q} needs one matrix per generator")
        actions[qi] = GAction(degrees[qi], tuple(parse_matrix(m) for m in mats))
    diff = {int(q): parse_matrix(m) for q, m in spec.differentials.items()}
    names = {int(q): list(v) for q, v in spec.basis_names.items()}
    try:
        return DgGModule(L, degrees, actions, diff, basis_names=names)
    except ValueError as e:
        raise ProblemError(str(e)) from e


def dump_module(V: DgGModule) -> ModuleSpec:
    return ModuleSpec(
        degrees={str(q): d for q, d in sorted(V.degrees.items())},
        actions={
            str(q): [dump_matrix(r) for r in V.action(q).rho] for q in sorted(V.degrees)
        },
        differentials={
            str(q): dump_matrix(V.diff_at(q)) for q in sorted(V.degrees) if V.dim(q + 1)
        },
        basis_names={str(q): list(v) for q, v in sorted(V.basis_names.items())},
    )


def dump_alpha(lp: LPModule, module_name: str) -> AlphaSpec:
    return AlphaSpec(
        module=module_name,
        components={str(k): dump_matrix(m) for k, m in sorted(lp.alpha.items())},
    )


class ProblemContext:
    """Core objects materialized from a problem file."""

    def __init__(self, problem: ProblemFile):
        self.problem = problem
        self.L = build_algebra(problem.lie_algebra)
        self.modules: dict[str, DgGModule] = {}
        self.pair: LiePair | None = None
        self.lp: LPModule | None = None
        self.lp_module_name: str | None = None
        self.ordinary: OrdinaryLP | None = None

        for name, spec in problem.modules.items():
            self.modules[name] = build_module(self.L, spec)
        if problem.lie_pair is not None:
            lps = problem.lie_pair
            basis = []
            for idx in lps.subalgebra_basis:
                col = [Fraction(0)] * self.L.dim
                col[idx] = Fraction(1)
                basis.append(col)
            j = parse_matrix(lps.splitting) if lps.splitting is not None else None
            self.pair = new_lie_pair(self.L, basis, j=j, quotient_names=lps.quotient_names)
        if problem.alpha is not None:
            name = problem.alpha.module
            if name == "__pair__" and self.pair is not None:
                V = pair_module(self.pair)
                self.modules.setdefault("__pair__", V)
            elif name not in self.modules:
                raise ProblemError(f"alpha references unknown module {name!r}")
            V = self.modules[name]
            alpha = {int(k): parse_matrix(m) for k, m in problem.alpha.components.items()}
            self.lp = LPModule(V, alpha)
            self.lp_module_name = name
        elif self.pair is not None:
            V = pair_module(self.pair)
            self.modules.setdefault("__pair__", V)
            self.lp = build_pair_lp(self.pair, V)
            self.lp_module_name = "__pair__"
        if problem.ordinary_lp is not None:
            spec = problem.ordinary_lp
            mats = [parse_matrix(m) for m in spec.action]
            if not mats:
                raise ProblemError("ordinary LP action is empty")
            self.ordinary = OrdinaryLP(self.L, GAction(mats[0].rows, tuple(mats)), parse_matrix(spec.x))
            if spec.resolution not in self.modules:
                raise ProblemError(f"resolution module {spec.resolution!r} not found")
            self.kernel_iso = parse_matrix(spec.kernel_iso)
            self.resolution_name = spec.resolution


def canonical_dump(problem: ProblemFile) -> str:
    """Deterministic JSON with canonical rational strings; loading and
    re-dumping a canonical file is byte-identical."""

    def canon(value):
        if isinstance(value, list):
            return [canon(v) for v in value]
        if isinstance(value, dict):
            return {k: canon(v) for k, v in value.items()}
        return value

    def canon_matrix(m):
        return [[dump_rational(parse_rational(x)) for x in row] for row in m]

    data = problem.model_dump(exclude_none=True)
    for spec in data.get("modules", {}).values():
        spec["actions"] = {q: [canon_matrix(m) for m in mats] for q, mats in spec.get("actions", {}).items()}
        spec["differentials"] = {q: canon_matrix(m) for q, m in spec.get("differentials", {}).items()}
    if data.get("alpha"):
        data["alpha"]["components"] = {
            k: canon_matrix(m) for k, m in data["alpha"]["components"].items()
        }
    if data.get("lie_pair") and data["lie_pair"].get("splitting") is not None:
        data["lie_pair"]["splitting"] = canon_matrix(data["lie_pair"]["splitting"])
    if data.get("ordinary_lp"):
        data["ordinary_lp"]["action"] = [canon_matrix(m) for m in data["ordinary_lp"]["action"]]
        data["ordinary_lp"]["x"] = canon_matrix(data["ordinary_lp"]["x"])
        data["ordinary_lp"]["kernel_iso"] = canon_matrix(data["ordinary_lp"]["kernel_iso"])
    sc = data["lie_algebra"].get("structure_constants", [])
    data["lie_algebra"]["structure_constants"] = sorted(
        ([int(e[0]), int(e[1]), int(e[2]), int(e[3]), int(e[4])] for e in sc)
    )
    return json.dumps(canon(data), sort_keys=True, indent=2) + "\n"


def load_problem(text: str) -> ProblemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemError(f"invalid JSON: {e}") from e
    if data.get("schema_version") != 1:
        raise ProblemError("schema_version must be 1")
    return ProblemFile.model_validate(data)


# ---------------------------------------------------------------------------
# cochain pretty-printing


def format_cochain(c: Cochain, L: LieAlgebra) -> str:
    if c.is_zero():
        return "0"
    bits = []
    for (I, q, j), coef in c.sorted_terms():
        formpart = "^".join(f"{L.basis_names[a]}*" for a in I)
        genpart = c.module.name(q, j)
        if genpart == "1":
            body = formpart or "1"
        else:
            body = f"{formpart}(x){genpart}" if formpart else genpart
        if coef == 1:
            bits.append(body)
        elif coef == -1:
            bits.append(f"-{body}")
        else:
            bits.append(f"{dump_rational(coef)} {body}")
    return " + ".join(bits).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# built-in fixtures


def builtin_sl2_pair() -> ProblemFile:
    """sl2 with the Borel subalgebra span(h, e); the module and alpha are
    derived from the pair data, so the file carries only the pair itself."""
    from .liepair import builtin_sl2

    p, _ = builtin_sl2()
    return ProblemFile(
        lie_algebra=dump_algebra(p.L),
        lie_pair=LiePairSpec(subalgebra_basis=[0, 1], quotient_names=["b"]),
    )


def builtin_sl2_killing() -> ProblemFile:
    from .lie import sl2

    L = sl2()
    pairing = Matrix.from_rows([[8, 0, 0], [0, 0, 4], [0, 4, 0]])
    lp = from_invariant_pairing(L, pairing)
    names = [f"{a}(x){b}" for a in L.basis_names for b in L.basis_names]
    lp.V.basis_names[1] = names
    return ProblemFile(
        lie_algebra=dump_algebra(L),
        modules={"V": dump_module(lp.V)},
        alpha=dump_alpha(lp, "V"),
    )


BUILTINS = {
    "sl2-pair": builtin_sl2_pair,
    "sl2-killing": builtin_sl2_killing,
}
