"""Service layer: every CLI subcommand is a plain function taking and
returning pydantic models, wrapped 1:1 by a FastAPI app so the same
operations are available over HTTP.  All computation is exact; reports are
deterministic (cochain printouts canonical, tables sorted).
"""

from __future__ import annotations

import itertools
import random
import time
from typing import Optional

from pydantic import BaseModel, Field

from .atiyah import (
    atiyah_cocycle,
    check_cocycle,
    hom_context,
    leibniz_on_cohomology,
)
from .complexes import (
    Cochain,
    DgGModule,
    d_ce,
    d_tot,
    form,
    omega_keys,
    shift,
    total_cohomology,
    trivial_module,
)
from .kapranov import (
    default_max_arity,
    generalized_jacobi,
    kapranov_recursion_check,
    kapranov_tower,
    leibniz_infty_check,
)
from .lie import LieAlgebraError
from .linalg import frac
from .lp import as_weak_morphism, lift_lp, lp_homotopic, to_cocycle, verify_lp
from .morphisms import LiftError, check_weak
from .problemfile import (
    BUILTINS,
    ProblemContext,
    ProblemError,
    ProblemFile,
    dump_alpha,
    format_cochain,
    load_problem,
)


class ServiceError(ValueError):
    """Input-level error (exit code 2 territory)."""


class ProblemRequest(BaseModel):
    problem: Optional[ProblemFile] = None
    builtin: Optional[str] = None


class ValidateResponse(BaseModel):
    command: str = "validate"
    status: str
    violations: list[str] = Field(default_factory=list)
    timing_ms: int = 0


class BracketsRequest(ProblemRequest):
    max_arity: Optional[int] = None


class BracketsResponse(BaseModel):
    command: str = "brackets"
    status: str
    differential: dict[str, str] = Field(default_factory=dict)
    tables: dict[str, dict[str, str]] = Field(default_factory=dict)
    recursion: Optional[str] = None
    timing_ms: int = 0


class LiftRequest(ProblemRequest):
    pass


class LiftResponse(BaseModel):
    command: str = "lift"
    status: str
    violations: list[str] = Field(default_factory=list)
    problem: Optional[ProblemFile] = None
    timing_ms: int = 0


class CheckRequest(ProblemRequest):
    leibniz_n: Optional[int] = None
    atiyah: bool = False
    homotopy_with: Optional[ProblemFile] = None
    seed: Optional[int] = None


class CheckResponse(BaseModel):
    command: str = "check"
    status: str
    results: dict[str, str] = Field(default_factory=dict)
    counterexample: Optional[str] = None
    witness: dict[str, str] = Field(default_factory=dict)
    timing_ms: int = 0


class CohomologyRequest(ProblemRequest):
    module: Optional[str] = None


class CohomologyResponse(BaseModel):
    command: str = "cohomology"
    status: str
    dims: dict[str, int] = Field(default_factory=dict)
    representatives: dict[str, list[str]] = Field(default_factory=dict)
    bracket: dict[str, str] = Field(default_factory=dict)
    leibniz: Optional[str] = None
    timing_ms: int = 0


def resolve_problem(req: ProblemRequest) -> ProblemFile:
    if (req.problem is None) == (req.builtin is None):
        raise ServiceError("provide exactly one of a problem file or a builtin name")
    if req.builtin is not None:
        if req.builtin not in BUILTINS:
            raise ServiceError(
                f"unknown builtin {req.builtin!r}; available: {', '.join(sorted(BUILTINS))}"
            )
        return BUILTINS[req.builtin]()
    return req.problem


def _context(req: ProblemRequest) -> ProblemContext:
    pf = resolve_problem(req)
    try:
        return ProblemContext(pf)
    except (ProblemError, LieAlgebraError, ValueError) as e:
        raise ServiceError(str(e)) from e


def _require_lp(ctx: ProblemContext):
    if ctx.lp is None:
        raise ServiceError("this command needs an LP structure (alpha or lie_pair)")
    return ctx.lp


def do_validate(req: ProblemRequest) -> ValidateResponse:
    t0 = time.monotonic()
    pf = resolve_problem(req)
    violations: list[str] = []
    try:
        ctx = ProblemContext(pf)
    except (ProblemError, LieAlgebraError, ValueError) as e:
        violations.append(str(e))
        ctx = None
    if ctx is not None:
        for name, V in sorted(ctx.modules.items()):
            try:
                V.validate()
            except ValueError as e:
                violations.append(f"module {name}: {e}")
        if ctx.lp is not None:
            bad = verify_lp(ctx.lp)
            if bad is not None:
                violations.append(
                    f"structure equations fail at degree {bad.k}, generator {bad.generator}: "
                    f"residual {format_cochain(bad.residual, ctx.lp.V.L)}"
                )
        if ctx.ordinary is not None:
            bad_i = ctx.ordinary.check()
            if bad_i is not None:
                violations.append(f"ordinary structure not equivariant at generator {bad_i}")
    status = "ok" if not violations else "invalid"
    return ValidateResponse(status=status, violations=violations,
                            timing_ms=int((time.monotonic() - t0) * 1000))


def do_brackets(req: BracketsRequest) -> BracketsResponse:
    t0 = time.monotonic()
    ctx = _context(req)
    lp = _require_lp(ctx)
    V = lp.V
    L = V.L
    max_arity = req.max_arity if req.max_arity is not None else default_max_arity(lp)
    if max_arity < 1:
        raise ServiceError("--max-arity must be at least 1")

    differential: dict[str, str] = {}
    triv = trivial_module(L)
    for i in range(L.dim):
        img = d_ce(form(triv, (i,), frac(1)))
        differential[f"{L.basis_names[i]}*"] = format_cochain(img, L)
    for q, j in V.generators():
        img = d_tot(Cochain.generator(V, q, j))
        differential[V.name(q, j)] = format_cochain(img, L)

    tables: dict[str, dict[str, str]] = {}
    recursion = None
    if max_arity >= 2:
        tower = kapranov_tower(lp, max_arity)
        M = tower.module
        gens = M.generators()
        for n in range(2, max_arity + 1):
            table = {}
            for tup in itertools.product(gens, repeat=n):
                val = tower.tables[n].entry(tup)
                if not val.is_zero():
                    key = f"R{n}({', '.join(V.name(q + 1, j) for q, j in tup)})"
                    table[key] = format_cochain(val, L)
            tables[f"R{n}"] = table
        mismatch = kapranov_recursion_check(lp, max_arity)
        if mismatch is None:
            recursion = "ok"
        else:
            recursion = (
                f"mismatch at arity {mismatch.arity} on "
                f"({', '.join(V.name(q + 1, j) for q, j in mismatch.gens)})"
            )
    return BracketsResponse(
        status="ok" if recursion in (None, "ok") else "failed",
        differential=differential,
        tables=tables,
        recursion=recursion,
        timing_ms=int((time.monotonic() - t0) * 1000),
    )


def do_lift(req: LiftRequest) -> LiftResponse:
    t0 = time.monotonic()
    pf = resolve_problem(req)
    ctx = _context(req)
    if ctx.ordinary is None:
        raise ServiceError("lift needs an ordinary_lp block")
    V = ctx.modules[ctx.resolution_name]
    try:
        lp = lift_lp(ctx.ordinary, V, ctx.kernel_iso)
    except LiftError as e:
        return LiftResponse(status="failed", violations=[str(e)],
                            timing_ms=int((time.monotonic() - t0) * 1000))
    violations = []
    bad = verify_lp(lp)
    if bad is not None:  # would indicate an internal bug, reported honestly
        violations.append(f"lifted structure fails verification at degree {bad.k}")
    out = pf.model_copy(deep=True)
    out.alpha = dump_alpha(lp, ctx.resolution_name)
    return LiftResponse(
        status="ok" if not violations else "failed",
        violations=violations,
        problem=out,
        timing_ms=int((time.monotonic() - t0) * 1000),
    )


def _random_tuples(M: DgGModule, n_max: int, seed: int, count: int) -> list[list[Cochain]]:
    rng = random.Random(seed)
    degs = sorted({q for q in range(M.bot, M.top + M.L.dim + 1) if omega_keys(M, q)})
    tuples = []
    for _ in range(count):
        n = rng.randint(2, n_max)
        args = []
        for _ in range(n):
            c = Cochain(M)
            d = rng.choice(degs)
            for key in omega_keys(M, d):
                v = rng.randint(-1, 1)
                if v:
                    c.add_term(key, frac(v))
            args.append(c)
        tuples.append(args)
    return tuples


def do_check(req: CheckRequest) -> CheckResponse:
    t0 = time.monotonic()
    ctx = _context(req)
    lp = _require_lp(ctx)
    L = lp.V.L
    results: dict[str, str] = {}
    counterexample = None
    witness: dict[str, str] = {}

    bad = verify_lp(lp)
    results["structure_equations"] = "ok" if bad is None else "failed"
    if bad is not None and counterexample is None:
        counterexample = (
            f"degree {bad.k} generator {bad.generator}: "
            f"{format_cochain(bad.residual, L)}"
        )
    chain = check_weak(as_weak_morphism(lp))
    results["weak_morphism"] = "ok" if chain is None else "failed"
    c, H, _ = to_cocycle(lp)
    results["cocycle_closed"] = "ok" if d_tot(c).is_zero() else "failed"

    if req.leibniz_n is not None:
        n_max = req.leibniz_n
        tower = kapranov_tower(lp, max(n_max, 2))
        bad_j = leibniz_infty_check(tower, n_max)
        if bad_j is None and req.seed is not None:
            extra = _random_tuples(tower.module, n_max, req.seed, 25)
            bad_j = leibniz_infty_check(tower, n_max, extra)
        results[f"leibniz_n{n_max}"] = "ok" if bad_j is None else "failed"
        if bad_j is not None and counterexample is None:
            counterexample = f"generalized Jacobi fails at n={bad_j.n}"

    if req.atiyah:
        W = shift(lp.V, 1)
        at = atiyah_cocycle(lp, W)
        residual = check_cocycle(at, hom_context(lp, W))
        results["atiyah_cocycle"] = "ok" if residual is None else "failed"

    if req.homotopy_with is not None:
        try:
            ctx2 = ProblemContext(req.homotopy_with)
        except (ProblemError, LieAlgebraError, ValueError) as e:
            raise ServiceError(f"homotopy target: {e}") from e
        lp2 = ctx2.lp
        if lp2 is None:
            raise ServiceError("homotopy target has no LP structure")
        if lp2.V.degrees != lp.V.degrees or lp2.V.L.c != L.c:
            raise ServiceError("homotopy target must share the module shape and algebra")
        # rebuild over the same module object so the structures are comparable
        from .lp import LPModule

        lp2 = LPModule(lp.V, lp2.alpha)
        h = lp_homotopic(lp, lp2)
        results["homotopic"] = "ok" if h is not None else "failed"
        if h is not None:
            for (k, l), m in sorted(h.components.items()):
                for col in range(m.cols):
                    vals = [str(m.data[r][col]) for r in range(m.rows)]
                    if any(v != "0" for v in vals):
                        witness[f"h[{k}] on {lp.V.name(k, col)}"] = "[" + ", ".join(vals) + "]"
            if not witness:
                witness["h"] = "0"

    status = "ok" if all(v == "ok" for v in results.values()) else "failed"
    return CheckResponse(status=status, results=results, counterexample=counterexample,
                         witness=witness, timing_ms=int((time.monotonic() - t0) * 1000))


def do_cohomology(req: CohomologyRequest) -> CohomologyResponse:
    t0 = time.monotonic()
    ctx = _context(req)
    if req.module is not None:
        if req.module not in ctx.modules:
            raise ServiceError(f"unknown module {req.module!r}")
        V = ctx.modules[req.module]
        lp = ctx.lp if ctx.lp is not None and ctx.lp.V is V else None
    elif ctx.lp is not None:
        V = ctx.lp.V
        lp = ctx.lp
    elif ctx.modules:
        name = sorted(ctx.modules)[0]
        V = ctx.modules[name]
        lp = None
    else:
        raise ServiceError("no module to compute cohomology of")

    L = V.L
    coh = total_cohomology(V)
    dims = {str(n): s.dim for n, s in sorted(coh.items())}
    reps = {
        str(n): [format_cochain(r, L) for r in s.representatives]
        for n, s in sorted(coh.items())
        if s.dim
    }
    bracket: dict[str, str] = {}
    leibniz = None
    if lp is not None:
        action = leibniz_on_cohomology(lp)
        classes = [
            (n, i) for n, s in sorted(coh.items()) for i in range(s.dim)
        ]

        def class_vector(c: Cochain, deg: int):
            if c.is_zero() or deg not in coh:
                return None
            vec = coh[deg].project(c)
            return vec if any(x != 0 for x in vec) else None

        for (na, ia), (nb, ib) in itertools.product(classes, repeat=2):
            cval = action.act_cochain(
                coh[na].representatives[ia], coh[nb].representatives[ib]
            )
            vec = class_vector(cval, na + nb)
            if vec is not None:
                bracket[f"[H^{na}#{ia}, H^{nb}#{ib}]"] = (
                    "[" + ", ".join(str(x) for x in vec) + f"] in H^{na + nb}"
                )
        leibniz = "ok"
        for a, b, c in itertools.product(classes, repeat=3):
            ra = coh[a[0]].representatives[a[1]]
            rb = coh[b[0]].representatives[b[1]]
            rc = coh[c[0]].representatives[c[1]]
            lhs = action.act_cochain(ra, action.act_cochain(rb, rc))
            rhs = action.act_cochain(action.act_cochain(ra, rb), rc)
            sgn = -1 if (a[0] % 2) and (b[0] % 2) else 1
            rhs = rhs + action.act_cochain(rb, action.act_cochain(ra, rc)).scale(sgn)
            if class_vector(lhs - rhs, a[0] + b[0] + c[0]) is not None:
                leibniz = (
                    f"failed on classes H^{a[0]}#{a[1]}, H^{b[0]}#{b[1]}, H^{c[0]}#{c[1]}"
                )
                break
    status = "ok" if leibniz in (None, "ok") else "failed"
    return CohomologyResponse(status=status, dims=dims, representatives=reps,
                              bracket=bracket, leibniz=leibniz,
                              timing_ms=int((time.monotonic() - t0) * 1000))


# ---------------------------------------------------------------------------
# FastAPI wiring


def create_app():
    from fastapi import FastAPI, HTTPException

    app = FastAPI(title="dglp", version="0.1.0")

    def guard(fn, req):
        try:
            return fn(req)
        except ServiceError as e:
            raise HTTPException(status_code=422, detail=str(e))

    @app.get("/builtins")
    def builtins() -> list[str]:
        return sorted(BUILTINS)

    @app.post("/validate")
    def validate(req: ProblemRequest) -> ValidateResponse:
        return guard(do_validate, req)

    @app.post("/brackets")
    def brackets(req: BracketsRequest) -> BracketsResponse:
        return guard(do_brackets, req)

    @app.post("/lift")
    def lift(req: LiftRequest) -> LiftResponse:
        return guard(do_lift, req)

    @app.post("/check")
    def check(req: CheckRequest) -> CheckResponse:
        return guard(do_check, req)

    @app.post("/cohomology")
    def cohomology(req: CohomologyRequest) -> CohomologyResponse:
        return guard(do_cohomology, req)

    return app
