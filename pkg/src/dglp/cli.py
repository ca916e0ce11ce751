"""Command-line front end.

Each subcommand is a thin client over the service layer: by default it calls
the service functions in-process; with --server URL it sends the same
request to a running HTTP instance and renders the identical response.
Text output is deterministic (no timing lines), so reports can be used as
golden files; JSON output carries the full response including timing.

Exit codes: 0 success, 1 validation/check failure, 2 input error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .problemfile import ProblemError, ProblemFile, canonical_dump, load_problem
from .service import (
    BracketsRequest,
    BracketsResponse,
    CheckRequest,
    CheckResponse,
    CohomologyRequest,
    CohomologyResponse,
    LiftRequest,
    LiftResponse,
    ProblemRequest,
    ServiceError,
    ValidateResponse,
    do_brackets,
    do_check,
    do_cohomology,
    do_lift,
    do_validate,
)

RESPONSE_TYPES = {
    "validate": ValidateResponse,
    "brackets": BracketsResponse,
    "lift": LiftResponse,
    "check": CheckResponse,
    "cohomology": CohomologyResponse,
}
LOCAL_HANDLERS = {
    "validate": do_validate,
    "brackets": do_brackets,
    "lift": do_lift,
    "check": do_check,
    "cohomology": do_cohomology,
}


def _read_problem(path: str | None) -> ProblemFile | None:
    if path is None:
        return None
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ServiceError(f"cannot read {path}: {e}") from e
    return load_problem(text)


def _dispatch(command: str, req, server: str | None):
    if server is None:
        return LOCAL_HANDLERS[command](req)
    import httpx

    resp = httpx.post(
        f"{server.rstrip('/')}/{command}",
        json=json.loads(req.model_dump_json()),
        timeout=300.0,
    )
    if resp.status_code == 422:
        detail = resp.json().get("detail", "invalid request")
        raise ServiceError(str(detail))
    resp.raise_for_status()
    return RESPONSE_TYPES[command].model_validate(resp.json())


def _emit(resp, fmt: str, render) -> None:
    if fmt == "json":
        click.echo(resp.model_dump_json(indent=2))
    else:
        for line in render(resp):
            click.echo(line)


def _finish(resp) -> None:
    sys.exit(0 if resp.status == "ok" else 1)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


problem_argument = click.argument("file", required=False, type=click.Path())
builtin_option = click.option("--builtin", default=None, help="use a built-in fixture")
format_option = click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text"
)
server_option = click.option("--server", default=None, help="URL of a running service")


@click.group()
def main() -> None:
    """Exact computations with dg Loday-Pirashvili modules."""


def _render_validate(r: ValidateResponse):
    yield "command: validate"
    yield f"status: {r.status}"
    for v in r.violations:
        yield f"violation: {v}"


@main.command()
@problem_argument
@builtin_option
@format_option
@server_option
def validate(file, builtin, fmt, server):
    """Run every structural validator on the input."""
    try:
        req = ProblemRequest(problem=_read_problem(file), builtin=builtin)
        resp = _dispatch("validate", req, server)
    except (ServiceError, ProblemError) as e:
        _fail(str(e))
    _emit(resp, fmt, _render_validate)
    _finish(resp)


def _render_brackets(r: BracketsResponse):
    yield "command: brackets"
    yield f"status: {r.status}"
    yield "[differential]"
    for k, v in r.differential.items():
        yield f"d({k}) = {v}"
    for name in sorted(r.tables, key=lambda s: int(s[1:])):
        yield f"[{name}]"
        for k, v in sorted(r.tables[name].items()):
            yield f"{k} = {v}"
    if r.recursion is not None:
        yield f"recursion: {r.recursion}"


@main.command()
@problem_argument
@builtin_option
@click.option("--max-arity", type=int, default=None)
@format_option
@server_option
@click.option("--output", type=click.Path(), default=None, help="write the report here")
def brackets(file, builtin, max_arity, fmt, server, output):
    """Differential and bracket tables with the recursion cross-check."""
    try:
        req = BracketsRequest(
            problem=_read_problem(file), builtin=builtin, max_arity=max_arity
        )
        resp = _dispatch("brackets", req, server)
    except (ServiceError, ProblemError) as e:
        _fail(str(e))
    if output:
        lines = (
            [resp.model_dump_json(indent=2)]
            if fmt == "json"
            else list(_render_brackets(resp))
        )
        Path(output).write_text("\n".join(lines) + "\n")
    _emit(resp, fmt, _render_brackets)
    _finish(resp)


def _render_lift(r: LiftResponse):
    yield "command: lift"
    yield f"status: {r.status}"
    for v in r.violations:
        yield f"violation: {v}"
    if r.problem is not None and r.problem.alpha is not None:
        yield f"alpha components: {', '.join(sorted(r.problem.alpha.components))}"


@main.command()
@problem_argument
@builtin_option
@format_option
@server_option
@click.option("--output", type=click.Path(), default=None,
              help="write the lifted structure as a canonical problem file")
def lift(file, builtin, fmt, server, output):
    """Lift an ordinary structure through an acyclic resolution."""
    try:
        req = LiftRequest(problem=_read_problem(file), builtin=builtin)
        resp = _dispatch("lift", req, server)
    except (ServiceError, ProblemError) as e:
        _fail(str(e))
    if output and resp.problem is not None:
        Path(output).write_text(canonical_dump(resp.problem))
    _emit(resp, fmt, _render_lift)
    _finish(resp)


def _render_check(r: CheckResponse):
    yield "command: check"
    yield f"status: {r.status}"
    for k, v in r.results.items():
        yield f"{k}: {v}"
    if r.counterexample:
        yield f"counterexample: {r.counterexample}"
    for k, v in r.witness.items():
        yield f"witness {k} = {v}"


@main.command()
@problem_argument
@builtin_option
@click.option("--leibniz-n", type=int, default=None)
@click.option("--atiyah", is_flag=True, default=False)
@click.option("--homotopy", "homotopy_file", type=click.Path(), default=None,
              help="second problem file to test homotopy against")
@click.option("--seed", type=int, default=None)
@format_option
@server_option
def check(file, builtin, leibniz_n, atiyah, homotopy_file, seed, fmt, server):
    """Structure equations plus optional identity and homotopy checks."""
    try:
        req = CheckRequest(
            problem=_read_problem(file),
            builtin=builtin,
            leibniz_n=leibniz_n,
            atiyah=atiyah,
            homotopy_with=_read_problem(homotopy_file),
            seed=seed,
        )
        resp = _dispatch("check", req, server)
    except (ServiceError, ProblemError) as e:
        _fail(str(e))
    _emit(resp, fmt, _render_check)
    _finish(resp)


def _render_cohomology(r: CohomologyResponse):
    yield "command: cohomology"
    yield f"status: {r.status}"
    for k, v in r.dims.items():
        yield f"dim H^{k} = {v}"
    for k, reps in r.representatives.items():
        for i, rep in enumerate(reps):
            yield f"H^{k}#{i} = [{rep}]"
    for k, v in r.bracket.items():
        yield f"{k} = {v}"
    if r.leibniz is not None:
        yield f"leibniz: {r.leibniz}"


@main.command()
@problem_argument
@builtin_option
@click.option("--module", "module_name", default=None)
@format_option
@server_option
def cohomology(file, builtin, module_name, fmt, server):
    """Total cohomology dims, representatives, and the induced bracket."""
    try:
        req = CohomologyRequest(
            problem=_read_problem(file), builtin=builtin, module=module_name
        )
        resp = _dispatch("cohomology", req, server)
    except (ServiceError, ProblemError) as e:
        _fail(str(e))
    _emit(resp, fmt, _render_cohomology)
    _finish(resp)


@main.command()
@builtin_option
@click.option("--output", type=click.Path(), default=None)
def export(builtin, output):
    """Write a built-in fixture as a canonical problem file."""
    try:
        req = ProblemRequest(builtin=builtin)
        from .service import resolve_problem

        pf = resolve_problem(req)
    except ServiceError as e:
        _fail(str(e))
    text = canonical_dump(pf)
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)
    sys.exit(0)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
