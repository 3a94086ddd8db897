"""Term archive: browse, search, select and export extracted terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .corpus import Document, Sentence
from .errors import OkbError

KIND_SINGLE = "single"
KIND_MULTI = "multi"
KIND_ABBR = "abbr"
KINDS = (KIND_SINGLE, KIND_MULTI, KIND_ABBR)


class TermStoreError(OkbError):
    pass


@dataclass
class Term:
    id: str
    lemmas: tuple[str, ...]
    kind: str
    frequency: int
    sentences: tuple[tuple[str, int], ...]  # (document id, sentence index)
    head_lemma: str
    selected: bool = False

    @property
    def label(self) -> str:
        return " ".join(self.lemmas)


@dataclass
class TermArchive:
    terms: list[Term] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.terms)

    def get(self, term_id: str) -> Term:
        for term in self.terms:
            if term.id == term_id:
                return term
        raise TermStoreError(f"no such term: {term_id}")

    def find(self, ref: str) -> Term:
        """Resolve a term by id or by its space-joined label."""
        for term in self.terms:
            if term.id == ref:
                return term
        folded = ref.casefold()
        for term in self.terms:
            if term.label.casefold() == folded:
                return term
        raise TermStoreError(f"no such term: {ref}")


def filter_terms(
    archive: TermArchive, kind: Optional[str] = None, query: Optional[str] = None
) -> list[Term]:
    """Terms of one kind and/or matching a case-insensitive substring, archive order."""
    if kind is not None and kind not in KINDS:
        raise TermStoreError(f"unknown term kind: {kind}")
    out = archive.terms
    if kind is not None:
        out = [t for t in out if t.kind == kind]
    if query:
        folded = query.casefold()
        out = [t for t in out if folded in t.label.casefold()]
    return list(out)


def set_selected(archive: TermArchive, term_id: str, on: bool) -> Term:
    """Idempotent selection flag update; returns the term."""
    term = archive.get(term_id)
    term.selected = bool(on)
    return term


def selected_terms(archive: TermArchive) -> list[Term]:
    return [t for t in archive.terms if t.selected]


def sentences_of(
    archive: TermArchive, term_id: str, corpus: Mapping[str, Document]
) -> list[tuple[str, Sentence]]:
    """The full sentences a term occurs in, in corpus order."""
    term = archive.get(term_id)
    out = []
    for doc_id, index in term.sentences:
        doc = corpus.get(doc_id)
        if doc is None or index >= len(doc.sentences):
            raise TermStoreError(f"term {term_id} references unknown sentence {doc_id}:{index}")
        out.append((doc_id, doc.sentences[index]))
    return out


def export_archive_tsv(archive: TermArchive) -> str:
    """Archive as TSV: lemmas, kind, frequency, comma-joined doc:sentence refs."""
    lines = []
    for term in archive.terms:
        refs = ",".join(f"{doc}:{idx}" for doc, idx in term.sentences)
        lines.append(f"{term.label}\t{term.kind}\t{term.frequency}\t{refs}")
    return "\n".join(lines) + ("\n" if lines else "")


def export_selection(archive: TermArchive) -> str:
    """Selected terms, one space-joined lemma sequence per line, archive order."""
    lines = [t.label for t in archive.terms if t.selected]
    return "\n".join(lines) + ("\n" if lines else "")
