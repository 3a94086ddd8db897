"""Project state and the staged pipeline around it.

A project owns its source resources (dictionary files, document texts), the
artifacts derived from them (lexicon, corpus, analyses, term archive), the
ontology being built, and an append-only event log. Work happens in stages:

    LOAD_DICTS  parse attached dictionaries into one lexicon
    INGEST      normalize and segment attached documents
    ANALYZE     tag, link, extract and aggregate terms
    BUILD_ONTOLOGY  draft a graph from the selected terms
    EXPORT      snapshot the ontology as canonical interchange XML

Each stage is PENDING, RUNNING, DONE or FAILED. Finishing a stage marks
everything downstream PENDING again, as does attaching a resource or changing
the term selection, so the status table always tells the truth about what is
stale. Re-running ANALYZE carries the selection forward by term identity
(kind plus lemmas), not by archive position.

Stage execution is split into stage_blocker / compute_stage / commit_stage so
a server can hold its lock only around the cheap parts; run_stage glues them
together for synchronous callers. compute_stage never mutates the project.

Projects persist as zip archives carrying only sources, decisions and the
log; derived artifacts are recomputed on load, which keeps the format small
and the loader honest.
"""

from __future__ import annotations

import io
import json
import uuid
import zipfile
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .analyzer import SentenceAnalysis, aggregate, analyze_document
from .convert import emit_kvp
from .corpus import Document, ingest_document
from .errors import OkbError
from .lexicon import Lexicon, load_lexicon
from .ontology import (
    Concept,
    OntologyGraph,
    Relation,
    apply_edit,
    build_draft,
    validate,
)
from .termstore import TermArchive, selected_terms, set_selected

LOAD_DICTS = "LOAD_DICTS"
INGEST = "INGEST"
ANALYZE = "ANALYZE"
BUILD_ONTOLOGY = "BUILD_ONTOLOGY"
EXPORT = "EXPORT"
STAGES = (LOAD_DICTS, INGEST, ANALYZE, BUILD_ONTOLOGY, EXPORT)

PENDING = "PENDING"
RUNNING = "RUNNING"
DONE = "DONE"
FAILED = "FAILED"
STATUSES = (PENDING, RUNNING, DONE, FAILED)

_PREREQS = {
    LOAD_DICTS: (),
    INGEST: (),
    ANALYZE: (LOAD_DICTS, INGEST),
    BUILD_ONTOLOGY: (ANALYZE,),
    EXPORT: (BUILD_ONTOLOGY,),
}

# Finishing (or invalidating) a stage makes these stale.
_DOWNSTREAM = {
    LOAD_DICTS: (ANALYZE, BUILD_ONTOLOGY, EXPORT),
    INGEST: (ANALYZE, BUILD_ONTOLOGY, EXPORT),
    ANALYZE: (BUILD_ONTOLOGY, EXPORT),
    BUILD_ONTOLOGY: (EXPORT,),
    EXPORT: (),
}

PROJECT_FORMAT = "okb-project"
PROJECT_VERSION = 1


class WorkbenchError(OkbError):
    pass


@dataclass(frozen=True)
class Resource:
    name: str
    text: str


@dataclass(frozen=True)
class Event:
    seq: int
    time: str
    stage: str
    message: str


@dataclass(frozen=True)
class Export:
    format: str
    text: str


@dataclass
class ProjectState:
    id: str
    name: str
    created: str
    dictionaries: list[Resource] = field(default_factory=list)
    documents: list[Resource] = field(default_factory=list)
    stages: dict[str, str] = field(default_factory=lambda: {s: PENDING for s in STAGES})
    events: list[Event] = field(default_factory=list)
    lexicon: Lexicon | None = None
    corpus: list[Document] = field(default_factory=list)
    analyses: list[SentenceAnalysis] = field(default_factory=list)
    archive: TermArchive | None = None
    ontology: OntologyGraph | None = None
    ontology_version: int = 0
    last_export: Export | None = None
    # Selection identities loaded from disk before the archive exists; the
    # next ANALYZE commit consumes them. Term ids are not stable across
    # re-analysis, (kind, lemmas) pairs are.
    pending_selection: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def new_project(name: str) -> ProjectState:
    name = name.strip()
    if not name:
        raise WorkbenchError("project name must not be empty")
    return ProjectState(id=uuid.uuid4().hex[:8], name=name, created=_now())


def add_event(state: ProjectState, stage: str, message: str) -> Event:
    event = Event(seq=len(state.events) + 1, time=_now(), stage=stage, message=message)
    state.events.append(event)
    return event


def _invalidate(state: ProjectState, stage: str) -> None:
    state.stages[stage] = PENDING
    for downstream in _DOWNSTREAM[stage]:
        state.stages[downstream] = PENDING


def attach_dictionary(state: ProjectState, name: str, text: str) -> None:
    state.dictionaries.append(Resource(name, text))
    _invalidate(state, LOAD_DICTS)
    add_event(state, LOAD_DICTS, f"attached dictionary {name!r}")


def attach_document(state: ProjectState, name: str, text: str) -> None:
    state.documents.append(Resource(name, text))
    _invalidate(state, INGEST)
    add_event(state, INGEST, f"attached document {name!r}")


# ---------------------------------------------------------------- stages

def stage_blocker(state: ProjectState, stage: str) -> str | None:
    """Why the stage cannot start right now, or None. Does not mutate."""
    if stage not in STAGES:
        raise WorkbenchError(f"unknown stage: {stage}")
    for prereq in _PREREQS[stage]:
        if state.stages[prereq] != DONE:
            return f"requires {prereq}"
    if stage == LOAD_DICTS and not state.dictionaries:
        return "no dictionaries"
    if stage == INGEST and not state.documents:
        return "no documents"
    if stage == BUILD_ONTOLOGY:
        assert state.archive is not None
        if not selected_terms(state.archive):
            return "nothing selected"
    return None


def _build_lexicon(resources: list[Resource]) -> Lexicon:
    merged: Lexicon | None = None
    for resource in resources:
        lexicon = load_lexicon(resource.text.splitlines(), source=resource.name)
        merged = lexicon if merged is None else merged.merge(lexicon)
    assert merged is not None
    return merged


def _build_corpus(resources: list[Resource]) -> list[Document]:
    return [
        ingest_document(resource.text, resource.name, doc_id=f"d{i}")
        for i, resource in enumerate(resources, start=1)
    ]


def _build_analysis(
    lexicon: Lexicon, corpus: list[Document]
) -> tuple[list[SentenceAnalysis], TermArchive]:
    analyses: list[SentenceAnalysis] = []
    per_doc = []
    for doc in corpus:
        doc_analyses = analyze_document(doc, lexicon)
        analyses.extend(doc_analyses)
        per_doc.append((doc.id, [occ for a in doc_analyses for occ in a.occurrences]))
    return analyses, aggregate(per_doc)


def compute_stage(state: ProjectState, stage: str):
    """Do the stage's work and return its result without touching state."""
    if stage == LOAD_DICTS:
        return _build_lexicon(state.dictionaries)
    if stage == INGEST:
        return _build_corpus(state.documents)
    if stage == ANALYZE:
        assert state.lexicon is not None
        return _build_analysis(state.lexicon, state.corpus)
    if stage == BUILD_ONTOLOGY:
        assert state.archive is not None
        return build_draft(state.name, selected_terms(state.archive), state.analyses)
    if stage == EXPORT:
        assert state.ontology is not None
        return Export("kvp", emit_kvp(state.ontology))
    raise WorkbenchError(f"unknown stage: {stage}")


def commit_stage(state: ProjectState, stage: str, result) -> None:
    """Store the stage result, mark DONE, mark downstream stale."""
    if stage == LOAD_DICTS:
        state.lexicon = result
        problems = len(result.problems)
        message = f"loaded {len(result)} entries from {len(state.dictionaries)} dictionaries"
        if problems:
            message += f", skipped {problems} bad rows"
        add_event(state, stage, message)
    elif stage == INGEST:
        state.corpus = result
        sentences = sum(len(doc.sentences) for doc in result)
        add_event(state, stage, f"ingested {len(result)} documents, {sentences} sentences")
    elif stage == ANALYZE:
        analyses, archive = result
        carried = _carry_selection(state.archive, archive, state.pending_selection)
        state.pending_selection = []
        state.analyses = analyses
        state.archive = archive
        add_event(state, stage, f"analysis complete: {archive.total} terms")
        if carried:
            add_event(state, stage, f"carried {carried} selections forward")
    elif stage == BUILD_ONTOLOGY:
        state.ontology = result
        state.ontology_version += 1
        add_event(
            state,
            stage,
            f"drafted {len(result.concepts)} concepts, {len(result.relations)} relations",
        )
    elif stage == EXPORT:
        state.last_export = result
        add_event(state, stage, f"exported {result.format}, {len(result.text)} characters")
    else:
        raise WorkbenchError(f"unknown stage: {stage}")
    state.stages[stage] = DONE
    for downstream in _DOWNSTREAM[stage]:
        state.stages[downstream] = PENDING


def fail_stage(state: ProjectState, stage: str, message: str) -> None:
    state.stages[stage] = FAILED
    add_event(state, stage, f"failed: {message}")


def run_stage(state: ProjectState, stage: str) -> None:
    """Run one stage synchronously; raises WorkbenchError on failure."""
    blocker = stage_blocker(state, stage)
    if blocker is not None:
        fail_stage(state, stage, blocker)
        raise WorkbenchError(blocker)
    add_event(state, stage, "started")
    state.stages[stage] = RUNNING
    try:
        result = compute_stage(state, stage)
    except OkbError as exc:
        fail_stage(state, stage, str(exc))
        raise
    commit_stage(state, stage, result)


def _carry_selection(old, new: TermArchive, pending=()) -> int:
    selected_keys = set(pending)
    if old is not None:
        selected_keys.update((t.kind, t.lemmas) for t in old.terms if t.selected)
    if not selected_keys:
        return 0
    carried = 0
    for term in new.terms:
        if (term.kind, term.lemmas) in selected_keys:
            term.selected = True
            carried += 1
    return carried


# ---------------------------------------------------------------- selection and editing

def select_term(state: ProjectState, term_id: str, on: bool) -> None:
    if state.archive is None:
        raise WorkbenchError("no term archive yet, run ANALYZE first")
    term = state.archive.get(term_id)
    if term.selected == on:
        return
    set_selected(state.archive, term_id, on)
    for downstream in (BUILD_ONTOLOGY, EXPORT):
        state.stages[downstream] = PENDING
    verb = "selected" if on else "deselected"
    add_event(state, ANALYZE, f"{verb} {term.label!r}")


def selection_ids(state: ProjectState) -> list[str]:
    if state.archive is None:
        return []
    return [t.id for t in state.archive.terms if t.selected]


def _selection_keys(state: ProjectState) -> list[tuple[str, tuple[str, ...]]]:
    if state.archive is not None:
        return [(t.kind, t.lemmas) for t in state.archive.terms if t.selected]
    return list(state.pending_selection)


def edit_ontology(state: ProjectState, edit: dict) -> None:
    if state.ontology is None:
        raise WorkbenchError("no ontology yet, run BUILD_ONTOLOGY first")
    state.ontology = apply_edit(state.ontology, edit)
    state.ontology_version += 1
    state.stages[EXPORT] = PENDING
    add_event(state, BUILD_ONTOLOGY, f"applied edit {edit.get('op', '?')}")


def replace_ontology(state: ProjectState, graph: OntologyGraph) -> None:
    problems = validate(graph)
    if problems:
        raise WorkbenchError(problems[0].message)
    state.ontology = graph
    state.ontology_version += 1
    state.stages[EXPORT] = PENDING
    add_event(state, BUILD_ONTOLOGY, "ontology replaced")


# ---------------------------------------------------------------- serialization

def ontology_to_dict(graph: OntologyGraph) -> dict:
    return {
        "name": graph.name,
        "concepts": [
            {"id": c.id, "label": c.label, "source": c.source} for c in graph.concepts
        ],
        "relations": [
            {"id": r.id, "type": r.type, "from": r.from_id, "to": r.to_id}
            for r in graph.relations
        ],
    }


def ontology_from_dict(data: dict) -> OntologyGraph:
    try:
        concepts = [
            Concept(str(c["id"]), str(c["label"]), str(c.get("source", "manual")))
            for c in data["concepts"]
        ]
        relations = [
            Relation(str(r["id"]), str(r["type"]), str(r["from"]), str(r["to"]))
            for r in data["relations"]
        ]
        return OntologyGraph(str(data["name"]), concepts, relations)
    except (KeyError, TypeError) as exc:
        raise WorkbenchError(f"malformed ontology payload: {exc}") from exc


def _dump(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2)


def save_project(state: ProjectState, path: str) -> None:
    """Write the project as a zip archive; derived artifacts are not stored."""
    if RUNNING in state.stages.values():
        raise WorkbenchError("cannot save while a stage is running")
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        archive.writestr(
            "manifest.json", _dump({"format": PROJECT_FORMAT, "version": PROJECT_VERSION})
        )
        archive.writestr(
            "project.json",
            _dump(
                {
                    "id": state.id,
                    "name": state.name,
                    "created": state.created,
                    "stages": state.stages,
                    "selection": [
                        {"kind": kind, "lemmas": list(lemmas)}
                        for kind, lemmas in _selection_keys(state)
                    ],
                    "ontology_version": state.ontology_version,
                }
            ),
        )
        archive.writestr(
            "dictionaries.json",
            _dump([{"name": r.name, "text": r.text} for r in state.dictionaries]),
        )
        archive.writestr(
            "documents.json",
            _dump([{"name": r.name, "text": r.text} for r in state.documents]),
        )
        archive.writestr(
            "ontology.json",
            _dump(None if state.ontology is None else ontology_to_dict(state.ontology)),
        )
        archive.writestr(
            "export.json",
            _dump(
                None
                if state.last_export is None
                else {"format": state.last_export.format, "text": state.last_export.text}
            ),
        )
        archive.writestr(
            "events.json",
            _dump(
                [
                    {"seq": e.seq, "time": e.time, "stage": e.stage, "message": e.message}
                    for e in state.events
                ]
            ),
        )
    with open(path, "wb") as handle:
        handle.write(buffer.getvalue())


def load_project(path: str) -> ProjectState:
    """Read a project archive and recompute the derived artifacts."""
    try:
        with zipfile.ZipFile(path) as archive:
            manifest = json.loads(archive.read("manifest.json"))
            if manifest.get("format") != PROJECT_FORMAT:
                raise WorkbenchError("corrupt project: not a project archive")
            version = manifest.get("version")
            if version != PROJECT_VERSION:
                raise WorkbenchError(
                    f"unsupported project version {version} (this build reads {PROJECT_VERSION})"
                )
            meta = json.loads(archive.read("project.json"))
            dictionaries = json.loads(archive.read("dictionaries.json"))
            documents = json.loads(archive.read("documents.json"))
            ontology_data = json.loads(archive.read("ontology.json"))
            export_data = json.loads(archive.read("export.json"))
            events_data = json.loads(archive.read("events.json"))
    except WorkbenchError:
        raise
    except (zipfile.BadZipFile, KeyError, ValueError, OSError) as exc:
        raise WorkbenchError(f"corrupt project: {exc}") from exc

    try:
        stages = {stage: str(meta["stages"][stage]) for stage in STAGES}
        for stage, status in stages.items():
            if status not in (PENDING, DONE, FAILED):
                raise WorkbenchError(f"corrupt project: stage {stage} is {status!r}")
        state = ProjectState(
            id=str(meta["id"]),
            name=str(meta["name"]),
            created=str(meta["created"]),
            dictionaries=[Resource(str(d["name"]), str(d["text"])) for d in dictionaries],
            documents=[Resource(str(d["name"]), str(d["text"])) for d in documents],
            stages=stages,
            events=[
                Event(int(e["seq"]), str(e["time"]), str(e["stage"]), str(e["message"]))
                for e in events_data
            ],
            ontology_version=int(meta["ontology_version"]),
        )
        selection = [
            (str(row["kind"]), tuple(str(lemma) for lemma in row["lemmas"]))
            for row in meta["selection"]
        ]
    except (KeyError, TypeError) as exc:
        raise WorkbenchError(f"corrupt project: {exc}") from exc

    if state.stages[LOAD_DICTS] == DONE:
        state.lexicon = _build_lexicon(state.dictionaries)
    if state.stages[INGEST] == DONE:
        state.corpus = _build_corpus(state.documents)
    if state.stages[ANALYZE] == DONE:
        assert state.lexicon is not None
        state.analyses, state.archive = _build_analysis(state.lexicon, state.corpus)
        by_key = {(t.kind, t.lemmas): t for t in state.archive.terms}
        for key in selection:
            term = by_key.get(key)
            if term is None:
                label = " ".join(key[1])
                raise WorkbenchError(f"corrupt project: selection names unknown term {label!r}")
            term.selected = True
    elif selection:
        state.pending_selection = selection
    if ontology_data is not None:
        state.ontology = ontology_from_dict(ontology_data)
    if export_data is not None:
        state.last_export = Export(str(export_data["format"]), str(export_data["text"]))
    return state
