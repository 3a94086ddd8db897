"""Shared fixtures: the bundled sample project and random data factories."""

from __future__ import annotations

import importlib.resources
import random

import pytest

from okb.analyzer import aggregate, analyze_document
from okb.corpus import ingest_document
from okb.lexicon import builtin_dictionary, load_lexicon
from okb.ontology import Concept, OntologyGraph, Relation

BASKET = (
    "обчислювальна система",
    "обчислювальна техніка",
    "пристрій",
    "комп'ютер",
    "конфігурація",
)


@pytest.fixture(scope="session")
def lexicon():
    return builtin_dictionary()


@pytest.fixture(scope="session")
def sample_text() -> str:
    return (
        importlib.resources.files("okb.data")
        .joinpath("sample_computing_uk.txt")
        .read_text("utf-8")
    )


@pytest.fixture(scope="session")
def dictionary_text() -> str:
    return (
        importlib.resources.files("okb.data")
        .joinpath("uk_it_dictionary.tsv")
        .read_text("utf-8")
    )


@pytest.fixture(scope="session")
def sample_doc(sample_text, lexicon):
    return ingest_document(sample_text, "sample", doc_id="d1")


@pytest.fixture(scope="session")
def analyses(sample_doc, lexicon):
    return analyze_document(sample_doc, lexicon)


@pytest.fixture
def archive(analyses):
    # Function-scoped: tests flip selection flags.
    return aggregate([("d1", [occ for a in analyses for occ in a.occurrences])])


# ---------------------------------------------------------------- factories

_SYLLABLES = ["ба", "ве", "ги", "до", "жу", "зе", "ки", "ло", "ми", "ну", "по", "ра", "си", "ту"]


def _word(rng: random.Random) -> str:
    return "".join(rng.choice(_SYLLABLES) for _ in range(rng.randint(2, 4)))


@pytest.fixture
def make_graph():
    """Factory for random valid ontology graphs with unique labels."""

    def make(rng: random.Random, max_concepts: int = 30) -> OntologyGraph:
        n = rng.randint(1, max_concepts)
        labels = set()
        while len(labels) < n:
            label = _word(rng)
            if rng.random() < 0.15:
                label += rng.choice([' "x"', " & y", " <z>", "-а"])
            labels.add(label)
        concepts = [Concept(f"c{i + 1}", label) for i, label in enumerate(sorted(labels))]
        rng.shuffle(concepts)

        triples = set()
        # is-a edges only from a later concept to an earlier one, so no cycles
        for _ in range(rng.randint(0, 2 * n)):
            a, b = rng.sample(range(n), 2) if n > 1 else (0, 0)
            if a == b:
                continue
            rel_type = rng.choice(["is-a", "object", "part-of", "attribute", "associated"])
            if rel_type == "is-a":
                a, b = max(a, b), min(a, b)
            triples.add((rel_type, concepts[a].id, concepts[b].id))
        relations = [
            Relation(f"r{i + 1}", t, f, to) for i, (t, f, to) in enumerate(sorted(triples))
        ]
        return OntologyGraph(_word(rng), concepts, relations)

    return make


def graph_fingerprint(graph: OntologyGraph):
    """Identity of a graph up to renaming of ids (labels must be unique)."""
    label_of = {c.id: c.label for c in graph.concepts}
    return (
        graph.name,
        tuple(sorted(c.label for c in graph.concepts)),
        tuple(sorted((r.type, label_of[r.from_id], label_of[r.to_id]) for r in graph.relations)),
    )


@pytest.fixture
def fingerprint():
    return graph_fingerprint


@pytest.fixture
def make_corpus_fixture():
    """Factory for (dictionary rows, document text) over a synthetic vocabulary.

    Noun and adjective paradigms are generated so that linking and extraction
    have real material to chew on: nominative/genitive/accusative forms,
    agreeing adjectives, verbs, prepositions, conjunctions.
    """

    def make(rng: random.Random, sentences: int = 8):
        rows = []
        nouns = []
        adjs = []
        verbs = []
        # word-class prefixes and letter suffixes keep the surfaces distinct
        # without digits, which would split under tokenization
        for i in range(6):
            base = f"сло{_word(rng)}{'бвгджз'[i]}"
            nouns.append(base)
            rows.append(f"{base}а\t{base}\tNOUN\tcase=nom,number=sg,gender=f")
            rows.append(f"{base}и\t{base}\tNOUN\tcase=gen,number=sg,gender=f")
            rows.append(f"{base}у\t{base}\tNOUN\tcase=acc,number=sg,gender=f")
        for i in range(4):
            base = f"при{_word(rng)}{'бвгд'[i]}"
            adjs.append(base)
            rows.append(f"{base}на\t{base}ний\tADJ\tcase=nom,number=sg,gender=f")
            rows.append(f"{base}ни\t{base}ний\tADJ\tcase=gen,number=sg,gender=f")
            rows.append(f"{base}ну\t{base}ний\tADJ\tcase=acc,number=sg,gender=f")
        for i in range(3):
            base = f"роб{_word(rng)}{'бвг'[i]}"
            verbs.append(base)
            rows.append(f"{base}ить\t{base}ити\tVERB")
        rows.append("у\tу\tPREP")
        rows.append("і\tі\tCONJ")
        rows.append("та\tта\tCONJ")

        noun_forms = {"nom": "а", "gen": "и", "acc": "у"}
        adj_forms = {"nom": "на", "gen": "ни", "acc": "ну"}

        def class_word() -> str:
            roll = rng.random()
            case = rng.choice(["nom", "gen", "acc"])
            if roll < 0.55:
                return rng.choice(nouns) + noun_forms[case]
            if roll < 0.8:
                return rng.choice(adjs) + adj_forms[case]
            if roll < 0.9:
                return rng.choice(verbs) + "ить"
            return rng.choice(["у", "і", "та", ","])

        lines = []
        for _ in range(sentences):
            words = [class_word() for _ in range(rng.randint(3, 12))]
            words[0] = rng.choice(nouns) + noun_forms[rng.choice(["nom", "gen", "acc"])]
            text = " ".join(words).replace(" ,", ",")
            lines.append(text[0].upper() + text[1:] + ".")
        return rows, " ".join(lines)

    return make


@pytest.fixture
def synthetic_project(make_corpus_fixture):
    """A loaded lexicon and analyzed corpus built from a seed."""

    def build(seed: int):
        rng = random.Random(seed)
        rows, text = make_corpus_fixture(rng)
        lex = load_lexicon(rows, source="synthetic")
        doc = ingest_document(text, "synthetic", doc_id="d1")
        doc_analyses = analyze_document(doc, lex)
        arch = aggregate([("d1", [occ for a in doc_analyses for occ in a.occurrences])])
        return lex, doc, doc_analyses, arch

    return build
