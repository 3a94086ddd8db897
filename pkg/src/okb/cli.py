"""Command line around the workbench.

Every command operates on one project file (-p/--project, default
./project.okb, env OKB_PROJECT), loading it, doing its work, and writing it
back. `okb serve` instead holds projects in memory behind the HTTP API.

A typical session:

    okb new "computing"
    okb dict add --builtin
    okb ingest --sample
    okb analyze
    okb terms --kind multi
    okb select "обчислювальна система" пристрій
    okb build
    okb export --format kvp -o out.kvp.xml
"""

from __future__ import annotations

import importlib.resources
import os
import sys

import click

from . import convert as convert_mod
from . import workbench
from .errors import OkbError
from .termstore import KINDS, export_archive_tsv, filter_terms, sentences_of
from .workbench import ProjectState, load_project, save_project

_BUILTIN_DICT = "uk_it_dictionary.tsv"
_SAMPLE_DOC = "sample_computing_uk.txt"


def _data_text(filename: str) -> str:
    return importlib.resources.files("okb.data").joinpath(filename).read_text("utf-8")


def _load(path: str) -> ProjectState:
    if not os.path.exists(path):
        raise OkbError(f"no project file {path!r}, create one with 'okb new'")
    return load_project(path)


def _run_and_save(state: ProjectState, path: str, stage: str) -> None:
    # Save even when the stage fails so the FAILED status and event survive.
    try:
        workbench.run_stage(state, stage)
    finally:
        save_project(state, path)


@click.group()
@click.option(
    "-p",
    "--project",
    "project_path",
    default="project.okb",
    envvar="OKB_PROJECT",
    show_default=True,
    metavar="FILE",
    help="Project file to operate on.",
)
@click.version_option(package_name="okb", prog_name="okb")
@click.pass_context
def cli(ctx: click.Context, project_path: str) -> None:
    """Build term lists and ontology drafts from tagged text."""
    ctx.obj = project_path


@cli.command()
@click.argument("name")
@click.pass_obj
def new(project_path: str, name: str) -> None:
    """Create a fresh project file."""
    if os.path.exists(project_path):
        raise OkbError(f"{project_path!r} already exists, remove it or pick another -p path")
    state = workbench.new_project(name)
    save_project(state, project_path)
    click.echo(f"created project {state.id} ({name!r}) in {project_path}")


@cli.group(name="dict")
def dictionary() -> None:
    """Manage tagging dictionaries."""


@dictionary.command("add")
@click.argument("paths", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--builtin", is_flag=True, help="Also attach the bundled Ukrainian IT dictionary.")
@click.pass_obj
def dict_add(project_path: str, paths: tuple[str, ...], builtin: bool) -> None:
    """Attach dictionary TSV files and reload the lexicon."""
    if not paths and not builtin:
        raise OkbError("nothing to add: pass TSV files or --builtin")
    state = _load(project_path)
    if builtin:
        workbench.attach_dictionary(state, _BUILTIN_DICT, _data_text(_BUILTIN_DICT))
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            workbench.attach_dictionary(state, os.path.basename(path), handle.read())
    _run_and_save(state, project_path, workbench.LOAD_DICTS)
    assert state.lexicon is not None
    click.echo(f"lexicon: {len(state.lexicon)} entries")
    for problem in state.lexicon.problems:
        click.echo(f"  warning: {problem.source}:{problem.line}: {problem.message}", err=True)


@cli.command()
@click.argument("paths", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--sample", is_flag=True, help="Also attach the bundled sample text.")
@click.pass_obj
def ingest(project_path: str, paths: tuple[str, ...], sample: bool) -> None:
    """Attach text documents and segment them."""
    if not paths and not sample:
        raise OkbError("nothing to ingest: pass text files or --sample")
    state = _load(project_path)
    if sample:
        workbench.attach_document(state, _SAMPLE_DOC, _data_text(_SAMPLE_DOC))
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            workbench.attach_document(state, os.path.basename(path), handle.read())
    _run_and_save(state, project_path, workbench.INGEST)
    sentences = sum(len(d.sentences) for d in state.corpus)
    click.echo(f"corpus: {len(state.corpus)} documents, {sentences} sentences")


@cli.command()
@click.pass_obj
def analyze(project_path: str) -> None:
    """Tag, link and extract terms from the corpus."""
    state = _load(project_path)
    _run_and_save(state, project_path, workbench.ANALYZE)
    assert state.archive is not None
    by_kind = {kind: 0 for kind in KINDS}
    for term in state.archive.terms:
        by_kind[term.kind] += 1
    parts = ", ".join(f"{n} {kind}" for kind, n in by_kind.items())
    click.echo(f"terms: {state.archive.total} ({parts})")


@cli.command()
@click.option("--kind", type=click.Choice(list(KINDS)), help="Only this term kind.")
@click.option("--search", "query", metavar="TEXT", help="Only labels containing TEXT.")
@click.option("--selected", "only_selected", is_flag=True, help="Only selected terms.")
@click.option("--tsv", "as_tsv", is_flag=True, help="Dump the whole archive as TSV.")
@click.pass_obj
def terms(
    project_path: str,
    kind: str | None,
    query: str | None,
    only_selected: bool,
    as_tsv: bool,
) -> None:
    """List extracted terms."""
    state = _load(project_path)
    if state.archive is None:
        raise OkbError("no term archive yet, run 'okb analyze' first")
    if as_tsv:
        click.echo(export_archive_tsv(state.archive), nl=False)
        return
    rows = filter_terms(state.archive, kind=kind, query=query)
    if only_selected:
        rows = [t for t in rows if t.selected]
    click.echo(f"{len(rows)} of {state.archive.total} terms")
    for term in rows:
        mark = "x" if term.selected else " "
        refs = ",".join(f"{doc}:{index + 1}" for doc, index in term.sentences)
        click.echo(f"{term.id:>5} [{mark}] {term.label}  ({term.kind}, freq {term.frequency}, {refs})")


@cli.command()
@click.argument("ref")
@click.pass_obj
def sentences(project_path: str, ref: str) -> None:
    """Show the sentences a term occurs in (by id or label)."""
    state = _load(project_path)
    if state.archive is None:
        raise OkbError("no term archive yet, run 'okb analyze' first")
    term = state.archive.find(ref)
    corpus = {doc.id: doc for doc in state.corpus}
    for doc_id, sentence in sentences_of(state.archive, term.id, corpus):
        click.echo(f"{doc_id}:{sentence.index + 1}  {sentence.text}")


def _set_selection(project_path: str, refs: tuple[str, ...], on: bool) -> None:
    state = _load(project_path)
    if state.archive is None:
        raise OkbError("no term archive yet, run 'okb analyze' first")
    for ref in refs:
        term = state.archive.find(ref)
        workbench.select_term(state, term.id, on)
        click.echo(f"{'selected' if on else 'deselected'} {term.label!r} ({term.id})")
    save_project(state, project_path)
    click.echo(f"selection: {len(workbench.selection_ids(state))} terms")


@cli.command()
@click.argument("refs", nargs=-1, required=True)
@click.pass_obj
def select(project_path: str, refs: tuple[str, ...]) -> None:
    """Mark terms (by id or label) as selected."""
    _set_selection(project_path, refs, True)


@cli.command()
@click.argument("refs", nargs=-1, required=True)
@click.pass_obj
def deselect(project_path: str, refs: tuple[str, ...]) -> None:
    """Clear the selection mark from terms."""
    _set_selection(project_path, refs, False)


@cli.command()
@click.pass_obj
def build(project_path: str) -> None:
    """Draft an ontology from the selected terms."""
    state = _load(project_path)
    _run_and_save(state, project_path, workbench.BUILD_ONTOLOGY)
    assert state.ontology is not None
    click.echo(
        f"ontology v{state.ontology_version}: "
        f"{len(state.ontology.concepts)} concepts, {len(state.ontology.relations)} relations"
    )


@cli.command()
@click.option("--format", "fmt", type=click.Choice(["kvp", "owl"]), default="kvp", show_default=True)
@click.option("-o", "--output", "output_path", type=click.Path(dir_okay=False), help="Write here instead of stdout.")
@click.pass_obj
def export(project_path: str, fmt: str, output_path: str | None) -> None:
    """Snapshot the ontology and print or save it."""
    state = _load(project_path)
    _run_and_save(state, project_path, workbench.EXPORT)
    assert state.last_export is not None
    text = state.last_export.text
    if fmt == "owl":
        text = convert_mod.emit_owl(convert_mod.parse_kvp(text))
    if output_path is None:
        click.echo(text, nl=False)
    else:
        with open(output_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        click.echo(f"wrote {fmt} to {output_path}", err=True)


@cli.command()
@click.option("--from", "source", type=click.Choice(["kvp", "owl"]), required=True)
@click.option("--to", "target", type=click.Choice(["kvp", "owl"]), required=True)
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("output_path", type=click.Path(dir_okay=False), required=False)
def convert(source: str, target: str, input_path: str, output_path: str | None) -> None:
    """Convert an ontology file between the two formats."""
    with open(input_path, encoding="utf-8") as handle:
        text = handle.read()
    output, warnings = convert_mod.convert(text, source, target)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    if output_path is None:
        click.echo(output, nl=False)
    else:
        with open(output_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(output)
        click.echo(f"wrote {target} to {output_path}", err=True)


@cli.command()
@click.pass_obj
def status(project_path: str) -> None:
    """Show stage statuses and artifact counts."""
    state = _load(project_path)
    click.echo(f"project {state.id} ({state.name!r}), created {state.created}")
    for stage in workbench.STAGES:
        click.echo(f"  {stage:<15} {state.stages[stage]}")
    click.echo(f"  dictionaries: {len(state.dictionaries)}, documents: {len(state.documents)}")
    if state.archive is not None:
        click.echo(
            f"  terms: {state.archive.total}, selected: {len(workbench.selection_ids(state))}"
        )
    if state.ontology is not None:
        click.echo(
            f"  ontology v{state.ontology_version}: {len(state.ontology.concepts)} concepts, "
            f"{len(state.ontology.relations)} relations"
        )


@cli.command()
@click.option("--since", default=0, show_default=True, help="Only events after this sequence number.")
@click.pass_obj
def events(project_path: str, since: int) -> None:
    """Print the project's event log."""
    state = _load(project_path)
    for event in state.events:
        if event.seq > since:
            click.echo(f"{event.seq:>4}  {event.time}  {event.stage:<15} {event.message}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), help="Serve this directory under /ui/.")
@click.pass_obj
def serve(project_path: str, host: str, port: int, ui_dir: str | None) -> None:
    """Serve the HTTP API (and optionally a web UI)."""
    from .server import ProjectStore, create_server

    store = ProjectStore()
    if os.path.exists(project_path):
        state = load_project(project_path)
        store.add(state)
        click.echo(f"loaded project {state.id} ({state.name!r}) from {project_path}")
    server = create_server(host=host, port=port, store=store, ui_dir=ui_dir)
    actual_host, actual_port = server.server_address[:2]
    click.echo(f"listening on http://{actual_host}:{actual_port}/ (changes stay in memory)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        click.echo("shutting down")
    finally:
        server.server_close()


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, prog_name="okb", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except OkbError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
