"""Command-line surface: synth, check, gen, bench, bi, serve.

Exit codes: 0 success, 2 validation failure, 3 budget or timeout exhausted,
4 input error.  Commands never prompt unless --interactive is given.  The
environment variable AFM_FORGE_THREADS caps internal parallelism (numba's
thread pool); AFM_FORGE_BACKEND picks the kernel backend.
"""

from __future__ import annotations

import json
import os

import click

from .audit import audit_maximality
from .errors import BudgetExceeded, ForgeError, MatrixError, SchemaError
from .knowledge import DefaultProvider, DomainKnowledge, load_dk
from .labkit import GeneratorParams, generate_matrix, run_benchmark
from .matrix import IngestionHints, parse_matrix
from .model import bind_model, render_text, to_json
from .pipeline import SynthesisOptions, synthesize
from .semantics import check_semantics

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_INPUT = 4


def _cap_threads():
    cap = os.environ.get("AFM_FORGE_THREADS")
    if not cap:
        return
    try:
        import numba

        numba.set_num_threads(max(1, int(cap)))
    except Exception:
        pass


class InteractiveProvider(DefaultProvider):
    """Prompts on the terminal at every decision point the file leaves open."""

    def _fallback(self, kind, subject, candidates, **info):
        if kind == "classify":
            click.echo(f"column {subject!r} has values: "
                       f"{', '.join(str(v) for v in info['observed_values'][:12])}")
        prompt = {"classify": f"kind of column {subject!r}",
                  "root": "root feature",
                  "parent": f"parent of {subject!r}",
                  "place": f"place of attribute {subject!r}",
                  "group": "groups to keep (comma-separated indices)",
                  "bounds": f"interesting bounds for {subject!r} (comma-separated)"}[kind]
        if kind == "group":
            for i, g in enumerate(candidates):
                click.echo(f"  [{i}] {g.kind} under {g.parent}: {', '.join(g.children)}")
            raw = click.prompt(prompt, default="0")
            answer = [candidates[int(i)] for i in raw.split(",") if i.strip()]
        elif kind == "bounds":
            click.echo(f"  domain: {', '.join(str(v) for v in candidates)}")
            raw = click.prompt(prompt)
            answer = [int(x) for x in raw.split(",") if x.strip()]
        else:
            for i, c in enumerate(candidates):
                click.echo(f"  [{i}] {c}")
            raw = click.prompt(prompt, default="0")
            answer = candidates[int(raw)] if raw.strip().isdigit() else raw.strip()
        self.record(kind, subject, candidates, answer)
        return answer


def _load_inputs(matrix_path, dk_path, dedup):
    dk = DomainKnowledge()
    if dk_path:
        with open(dk_path, "r", encoding="utf-8") as fh:
            dk = load_dk(fh.read())
    with open(matrix_path, "r", encoding="utf-8") as fh:
        text = fh.read()
    identifiers = {c for c, k in dk.column_kinds.items() if k == "identifier"}
    matrix = parse_matrix(text, IngestionHints(identifier_columns=identifiers,
                                               drop_duplicates=dedup))
    return matrix, dk


@click.group()
def main():
    """Synthesize attributed feature models from configuration matrices."""
    _cap_threads()


@main.command()
@click.argument("matrix_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--dk", "dk_path", type=click.Path(exists=True, dir_okay=False),
              help="Domain-knowledge JSON file.")
@click.option("-o", "--out", "out_path", type=click.Path(dir_okay=False),
              help="Write the model JSON here (default: stdout).")
@click.option("--text-out", type=click.Path(dir_okay=False),
              help="Also write the human-readable tree rendering.")
@click.option("--no-phi", is_flag=True, help="Omit the residual constraint "
              "(diagram-only, over-approximate).")
@click.option("--or-groups", "or_budget", is_flag=False, flag_value="30000",
              default=None, help="Enable or-group search, optionally =budget-ms.")
@click.option("--interactive/--no-interactive", default=False,
              help="Prompt for open decisions instead of using heuristics.")
@click.option("--dedup", is_flag=True, help="Drop duplicate rows with a warning "
              "instead of rejecting them.")
def synth(matrix_path, dk_path, out_path, text_out, no_phi, or_budget, interactive, dedup):
    """Synthesize a model from a CSV configuration matrix."""
    try:
        matrix, dk = _load_inputs(matrix_path, dk_path, dedup)
        provider = (InteractiveProvider if interactive else DefaultProvider)(dk)
        options = SynthesisOptions(
            or_groups=or_budget is not None,
            or_budget_ms=int(or_budget) if or_budget is not None else 30_000,
            phi=not no_phi)
        model = synthesize(matrix, provider, options)
    except (MatrixError, SchemaError, ForgeError) as e:
        click.echo(f"error [{e.stage}/{e.code}]: {e}", err=True)
        raise SystemExit(EXIT_INPUT)
    payload = to_json(model)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(payload, nl=False)
    if text_out:
        with open(text_out, "w", encoding="utf-8") as fh:
            fh.write(render_text(model))
        click.echo(f"wrote {text_out}")


@main.command()
@click.argument("afm_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("matrix_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--budget", type=int, default=1_000_000,
              help="Enumeration budget in visited nodes.")
def check(afm_path, matrix_path, budget):
    """Validate a model file: soundness, completeness, maximality."""
    try:
        with open(afm_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        dedup = bool(doc.get("provenance", {}).get("duplicates_dropped"))
        identifiers = set(doc.get("identifier_columns", []))
        with open(matrix_path, "r", encoding="utf-8") as fh:
            matrix = parse_matrix(fh.read(), IngestionHints(identifier_columns=identifiers,
                                                            drop_duplicates=dedup))
        model = bind_model(doc, matrix)
    except (json.JSONDecodeError, MatrixError, SchemaError) as e:
        click.echo(f"error: {e}", err=True)
        raise SystemExit(EXIT_INPUT)
    try:
        report = check_semantics(model, model.vm.matrix, budget)
        audit = audit_maximality(model, model.vm.matrix, budget=budget)
    except BudgetExceeded as e:
        click.echo(f"budget exceeded: {e}", err=True)
        raise SystemExit(EXIT_BUDGET)
    click.echo(report.summary())
    for c in report.extra[:20]:
        click.echo(f"  extra: {c}")
    for c in report.missing[:20]:
        click.echo(f"  missing: {c}")
    click.echo(audit.summary())
    ok = report.sound and report.complete and audit.ok
    raise SystemExit(EXIT_OK if ok else EXIT_VALIDATION)


@main.command()
@click.option("-v", "n_vars", type=int, required=True, help="Variable count.")
@click.option("-c", "n_rows", type=int, required=True, help="Configuration count.")
@click.option("-d", "dom", type=int, required=True, help="Maximum domain size.")
@click.option("--seed", type=int, default=0)
@click.option("-o", "--out", "out_path", type=click.Path(dir_okay=False))
def gen(n_vars, n_rows, dom, seed, out_path):
    """Generate a seeded random configuration matrix as CSV."""
    try:
        matrix = generate_matrix(GeneratorParams(n_vars, n_rows, dom, seed=seed))
    except ForgeError as e:
        click.echo(f"error: {e}", err=True)
        raise SystemExit(EXIT_INPUT)
    text = matrix.to_csv_text()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        click.echo(f"wrote {out_path} ({matrix.n_rows} distinct rows)")
    else:
        click.echo(text, nl=False)


def _parse_sweep(spec: str):
    if "=" not in spec:
        raise SchemaError("sweep must look like c=100:5000 or c=100,200,400")
    name, _, body = spec.partition("=")
    name = name.strip()
    if name not in ("v", "c", "d"):
        raise SchemaError("sweep parameter must be one of v, c, d")
    if "," in body:
        return name, [int(x) for x in body.split(",") if x.strip()]
    parts = [int(x) for x in body.split(":")]
    if len(parts) == 2:
        lo, hi, steps = parts[0], parts[1], 5
    elif len(parts) == 3:
        lo, hi, steps = parts
    else:
        raise SchemaError("range sweep must be start:end[:steps]")
    if steps < 2 or lo < 1 or hi <= lo:
        raise SchemaError("bad sweep range")
    ratio = (hi / lo) ** (1 / (steps - 1))
    values = sorted({int(round(lo * ratio ** i)) for i in range(steps)})
    return name, values


def _parse_timeout(text: str) -> int:
    text = text.strip().lower()
    if text.endswith("ms"):
        return int(float(text[:-2]))
    if text.endswith("s"):
        return int(float(text[:-1]) * 1000)
    return int(float(text))


@main.command()
@click.option("--sweep", required=True, help="e.g. c=500:8000 or v=50,100,200.")
@click.option("--v", "fix_v", type=int, default=None)
@click.option("--c", "fix_c", type=int, default=None)
@click.option("--d", "fix_d", type=int, default=None)
@click.option("--reps", type=int, default=10)
@click.option("--seed", type=int, default=0)
@click.option("--or-groups", is_flag=True, default=False)
@click.option("--timeout", default=None, help="Per-run or-group budget, e.g. 10s.")
@click.option("--backend", type=click.Choice(["auto", "numba", "numpy", "both"]),
              default="auto", help="Kernel backend; 'both' compares them.")
@click.option("--parallel", is_flag=True, default=False,
              help="Run sweep points concurrently (less stable timing).")
@click.option("-o", "--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--plot-data", "plot_path", type=click.Path(dir_okay=False))
def bench(sweep, fix_v, fix_c, fix_d, reps, seed, or_groups, timeout, backend,
          parallel, out_path, plot_path):
    """Benchmark synthesis over a parameter sweep; emit CSV and plot data."""
    try:
        name, values = _parse_sweep(sweep)
        fixed = {"v": fix_v, "c": fix_c, "d": fix_d}
        fixed.pop(name)
        missing = [k for k, v in fixed.items() if v is None]
        if missing:
            raise SchemaError(f"missing fixed parameter(s): {', '.join(missing)}")
        budget = _parse_timeout(timeout) if timeout else None
        backends = ("numba", "numpy") if backend == "both" else (backend,)
        report = run_benchmark(name, values, fixed, reps=reps, base_seed=seed,
                               or_groups=or_groups, or_budget_ms=budget,
                               backends=backends, parallel=parallel)
    except (SchemaError, ForgeError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        raise SystemExit(EXIT_INPUT)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_csv())
    click.echo(f"wrote {out_path}")
    if plot_path:
        with open(plot_path, "w", encoding="utf-8") as fh:
            fh.write(report.plot_data())
        click.echo(f"wrote {plot_path}")
    for fit in report.fits:
        click.echo(f"{fit['series']}: r={fit['r']:.4f}")
    if or_groups:
        rate = sum(r.timed_out for r in report.runs) / max(1, len(report.runs))
        click.echo(f"or-group timeout rate: {rate:.0%}")


@main.command()
@click.argument("matrix_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--dk", "dk_path", type=click.Path(exists=True, dir_okay=False))
def bi(matrix_path, dk_path):
    """Dump the binary-implication set as sorted tab-separated text."""
    from .implications import compute_binary_implications

    try:
        matrix, _ = _load_inputs(matrix_path, dk_path, dedup=False)
    except (MatrixError, SchemaError) as e:
        click.echo(f"error: {e}", err=True)
        raise SystemExit(EXIT_INPUT)
    click.echo(compute_binary_implications(matrix).dump_text(), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8571)
@click.option("--persist", "persist_dir", type=click.Path(file_okay=False),
              default=None, help="Directory for session transcripts.")
def serve(host, port, persist_dir):
    """Run the interactive-session HTTP API."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(persist_dir=persist_dir), host=host, port=port)


if __name__ == "__main__":
    main()
