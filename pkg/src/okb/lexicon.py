"""Inflected-form dictionaries: lookup, lemmatization, morphological features.

A dictionary is a TSV stream, one record per line:

    surface<TAB>lemma<TAB>pos[<TAB>features]

where ``features`` is a comma-joined list of ``key=value`` pairs. Lines that
are blank or start with ``#`` are skipped. Surfaces are matched after
case-folding; when a surface has several records, file order decides which
one a tagger sees first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import OkbError

POS_TAGS = frozenset(
    {"NOUN", "ADJ", "VERB", "CONJ", "PREP", "PRON", "NUM", "PART", "ADV", "ABBR"}
)

FEATURE_VALUES = {
    "case": frozenset({"nom", "gen", "dat", "acc", "ins", "loc", "voc"}),
    "number": frozenset({"sg", "pl"}),
    "gender": frozenset({"m", "f", "n"}),
}


class LexiconError(OkbError):
    pass


@dataclass(frozen=True)
class LexEntry:
    """One dictionary record. ``features`` is a sorted tuple of (key, value) pairs."""

    surface: str
    lemma: str
    pos: str
    features: tuple[tuple[str, str], ...] = ()

    def feature(self, key: str) -> Optional[str]:
        for k, v in self.features:
            if k == key:
                return v
        return None

    def features_dict(self) -> dict[str, str]:
        return dict(self.features)


@dataclass(frozen=True)
class RowProblem:
    """A malformed dictionary row, kept so loads are never silently lossy."""

    source: str
    line: int
    message: str


def _is_abbreviation(surface: str) -> bool:
    return 2 <= len(surface) <= 6 and surface.isalpha() and surface.isupper()


class Lexicon:
    """Surface-indexed view over one or more loaded dictionaries."""

    def __init__(self) -> None:
        self._by_surface: dict[str, list[LexEntry]] = {}
        self._by_lemma: dict[tuple[str, str], list[LexEntry]] = {}
        self._seen: set[tuple] = set()
        self.sources: list[str] = []
        self.problems: list[RowProblem] = []

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_surface.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lexicon):
            return NotImplemented
        return (
            self._by_surface == other._by_surface
            and self.sources == other.sources
            and self.problems == other.problems
        )

    def _add(self, entry: LexEntry) -> None:
        key = (entry.surface, entry.lemma, entry.pos, entry.features)
        if key in self._seen:
            return
        self._seen.add(key)
        self._by_surface.setdefault(entry.surface, []).append(entry)
        self._by_lemma.setdefault((entry.lemma, entry.pos), []).append(entry)

    def lookup(self, surface: str) -> list[LexEntry]:
        """All entries for a surface (case-insensitive), in file order.

        Returns an independent list; an unknown surface yields [].
        """
        return list(self._by_surface.get(surface.casefold(), ()))

    def lemmatize(self, surface: str) -> tuple[str, str]:
        """Best (lemma, pos) for a surface.

        Known surfaces take their first dictionary entry. Unknown surfaces
        fall back to (surface, ABBR) when the surface looks like an
        abbreviation (2-6 uppercase letters, original casing kept), else to
        (case-folded surface, NOUN).
        """
        entries = self._by_surface.get(surface.casefold())
        if entries:
            first = entries[0]
            return first.lemma, first.pos
        if _is_abbreviation(surface):
            return surface, "ABBR"
        return surface.casefold(), "NOUN"

    def find_form(self, lemma: str, pos: str, **features: str) -> Optional[str]:
        """Surface of the first entry for (lemma, pos) matching all given features."""
        for entry in self._by_lemma.get((lemma, pos), ()):
            if all(entry.feature(k) == v for k, v in features.items()):
                return entry.surface
        return None

    def merge(self, other: "Lexicon") -> "Lexicon":
        """New lexicon with this one's records first, then the other's."""
        merged = Lexicon()
        merged.sources = self.sources + other.sources
        merged.problems = self.problems + other.problems
        for lex in (self, other):
            for entries in lex._by_surface.values():
                for entry in entries:
                    merged._add(entry)
        return merged


def _parse_features(raw: str) -> tuple[tuple[str, str], ...]:
    pairs = {}
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ValueError(f"feature {chunk!r} is not key=value")
        key, _, value = chunk.partition("=")
        key, value = key.strip(), value.strip()
        if key not in FEATURE_VALUES:
            raise ValueError(f"unknown feature key {key!r}")
        if value not in FEATURE_VALUES[key]:
            raise ValueError(f"bad value {value!r} for feature {key!r}")
        pairs[key] = value
    return tuple(sorted(pairs.items()))


def load_lexicon(rows: Iterable[str], source: str = "dictionary") -> Lexicon:
    """Load a TSV dictionary stream into a Lexicon.

    Every well-formed record is kept; malformed records are collected on
    ``lexicon.problems`` with their line numbers instead of being silently
    dropped. Identical records collapse to one. Raises LexiconError("empty
    dictionary") when no well-formed record is found at all.
    """
    lex = Lexicon()
    lex.sources.append(source)
    for line_no, raw in enumerate(rows, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            lex.problems.append(
                RowProblem(source, line_no, "expected at least 3 tab-separated fields")
            )
            continue
        surface, lemma, pos = (f.strip() for f in fields[:3])
        if not surface or not lemma:
            lex.problems.append(RowProblem(source, line_no, "empty surface or lemma"))
            continue
        if pos not in POS_TAGS:
            lex.problems.append(RowProblem(source, line_no, f"unknown pos tag {pos!r}"))
            continue
        try:
            features = _parse_features(fields[3]) if len(fields) > 3 else ()
        except ValueError as exc:
            lex.problems.append(RowProblem(source, line_no, str(exc)))
            continue
        lex._add(LexEntry(surface.casefold(), lemma, pos, features))
    if len(lex) == 0:
        raise LexiconError("empty dictionary")
    return lex


def builtin_dictionary() -> Lexicon:
    """The bundled Ukrainian computing-domain dictionary."""
    from importlib.resources import files

    text = files("okb.data").joinpath("uk_it_dictionary.tsv").read_text("utf-8")
    return load_lexicon(text.splitlines(), source="uk_it_dictionary.tsv")
