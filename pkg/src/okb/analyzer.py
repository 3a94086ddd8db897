"""Shallow analysis: POS tagging, rule-based linking, pattern term extraction.

The grammar is deliberately small. Four link rules:

* attributive: ADJ immediately before a NOUN it agrees with (head = noun);
* possessive: NOUN followed by a genitive NOUN, with nothing in between but
  adjectives attributed to that second noun (head = first noun);
* objective: VERB followed within three tokens by an accusative or
  case-ambiguous NOUN, with no preposition or verb in between (head = verb);
* homogeneous: run of same-POS, same-case words joined by commas and/or the
  coordinating conjunctions і/й/та/и/"а також" (links fan out from the first
  member).

Term candidates are POS patterns over the tagged tokens; multiword patterns
must be licensed by the links above. Matching is leftmost-longest. After a
maximal multiword match, its licensed sub-patterns and every noun inside any
of those matches are emitted as nested occurrences, so a noun's frequency
counts each containing term occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .corpus import Document, Sentence, Token
from .lexicon import Lexicon
from . import termstore

ATTRIBUTIVE = "attributive"
POSSESSIVE = "possessive"
OBJECTIVE = "objective"
HOMOGENEOUS = "homogeneous"

# coordinating conjunctions that may separate homogeneous members; "а також"
# is handled as a two-token pair, bare "а" is adversative and does not count
COORDINATORS = frozenset({"і", "й", "та", "и"})

PATTERN_ABBR = "ABBR"
PATTERN_N = "N"
PATTERN_ADJ_N = "ADJ_N"
PATTERN_N_NGEN = "N_NGEN"
PATTERN_ADJ_N_NGEN = "ADJ_N_NGEN"
PATTERN_N_ADJ_N = "N_ADJ_N"

# offset of the head noun from the span start, per pattern
_HEAD_OFFSET = {
    PATTERN_ABBR: 0,
    PATTERN_N: 0,
    PATTERN_ADJ_N: 1,
    PATTERN_N_NGEN: 0,
    PATTERN_ADJ_N_NGEN: 1,
    PATTERN_N_ADJ_N: 0,
}


@dataclass(frozen=True)
class TaggedToken:
    token: Token
    lemma: str
    pos: Optional[str]  # None for PUNCT/NUM tokens
    features: tuple[tuple[str, str], ...] = ()
    ambiguous: bool = False

    def feature(self, key: str) -> Optional[str]:
        for k, v in self.features:
            if k == key:
                return v
        return None


@dataclass(frozen=True)
class DependencyLink:
    relation: str
    head: int
    dependent: int


@dataclass(frozen=True)
class TermOccurrence:
    pattern: str
    lemmas: tuple[str, ...]
    sentence: int
    start: int
    end: int  # inclusive token index

    @property
    def head_index(self) -> int:
        return self.start + _HEAD_OFFSET[self.pattern]


@dataclass(frozen=True)
class SentenceAnalysis:
    doc_id: str
    index: int
    tagged: tuple[TaggedToken, ...]
    links: tuple[DependencyLink, ...]
    occurrences: tuple[TermOccurrence, ...]


def tag(sentence: Sentence, lexicon: Lexicon) -> list[TaggedToken]:
    """Tag every token of a sentence against the lexicon.

    WORD tokens take their first dictionary entry (the ambiguous flag records
    that others existed); unknown words fall back to ABBR for 2-6 uppercase
    letters, else NOUN. PUNCT and NUM tokens pass through untagged.
    """
    tagged = []
    for tok in sentence.tokens:
        if tok.kind != "WORD":
            tagged.append(TaggedToken(tok, tok.surface, None))
            continue
        entries = lexicon.lookup(tok.surface)
        if entries:
            first = entries[0]
            tagged.append(
                TaggedToken(tok, first.lemma, first.pos, first.features, len(entries) > 1)
            )
        else:
            lemma, pos = lexicon.lemmatize(tok.surface)
            tagged.append(TaggedToken(tok, lemma, pos))
    return tagged


def _agree(a: TaggedToken, b: TaggedToken) -> bool:
    fa, fb = dict(a.features), dict(b.features)
    return all(fa[k] == fb[k] for k in fa.keys() & fb.keys())


def link(tagged: list[TaggedToken]) -> list[DependencyLink]:
    """Apply the four link rules left to right; at most one link per triple."""
    links: list[DependencyLink] = []
    seen: set[tuple[str, int, int]] = set()

    def add(relation: str, head: int, dependent: int) -> None:
        key = (relation, head, dependent)
        if key not in seen:
            seen.add(key)
            links.append(DependencyLink(relation, head, dependent))

    n = len(tagged)

    attr_of: dict[int, int] = {}
    for i in range(n - 1):
        if (
            tagged[i].pos == "ADJ"
            and tagged[i + 1].pos == "NOUN"
            and _agree(tagged[i], tagged[i + 1])
        ):
            add(ATTRIBUTIVE, i + 1, i)
            attr_of[i] = i + 1

    for i in range(n):
        if tagged[i].pos != "NOUN":
            continue
        j = i + 1
        while j < n and tagged[j].pos == "ADJ":
            j += 1
        if (
            j < n
            and tagged[j].pos == "NOUN"
            and tagged[j].feature("case") == "gen"
            and all(attr_of.get(k) == j for k in range(i + 1, j))
        ):
            add(POSSESSIVE, i, j)

    for v in range(n):
        if tagged[v].pos != "VERB":
            continue
        for k in range(v + 1, min(v + 4, n)):
            t = tagged[k]
            if t.pos in ("PREP", "VERB"):
                break
            if t.pos == "NOUN":
                case = t.feature("case")
                if case == "acc" or case is None or t.ambiguous:
                    add(OBJECTIVE, v, k)
                break

    i = 0
    while i < n:
        if tagged[i].pos is None:
            i += 1
            continue
        members = [i]
        k = i + 1
        while True:
            j = k
            seps = 0
            while j < n:
                t = tagged[j]
                if t.token.kind == "PUNCT" and t.token.surface == ",":
                    j += 1
                    seps += 1
                    continue
                if t.token.kind == "WORD":
                    s = t.token.surface.casefold()
                    if s in COORDINATORS:
                        j += 1
                        seps += 1
                        continue
                    if (
                        s == "а"
                        and j + 1 < n
                        and tagged[j + 1].token.surface.casefold() == "також"
                    ):
                        j += 2
                        seps += 1
                        continue
                break
            if (
                seps
                and j < n
                and tagged[j].token.kind == "WORD"
                and tagged[j].pos == tagged[i].pos
                and _case_compatible(tagged[i], tagged[j])
            ):
                members.append(j)
                k = j + 1
            else:
                break
        if len(members) >= 2:
            for m in members[1:]:
                add(HOMOGENEOUS, members[0], m)
            i = members[-1] + 1
        else:
            i += 1

    return links


def _case_compatible(a: TaggedToken, b: TaggedToken) -> bool:
    ca, cb = a.feature("case"), b.feature("case")
    return ca is None or cb is None or ca == cb


def _adj_citation(adj: TaggedToken, noun: TaggedToken, lexicon: Optional[Lexicon]) -> str:
    """Nominative form of an adjective agreed with its noun's gender."""
    gender = noun.feature("gender")
    if lexicon is not None and gender is not None:
        form = lexicon.find_form(adj.lemma, "ADJ", case="nom", number="sg", gender=gender)
        if form is not None:
            return form
    return adj.lemma


def extract_terms(
    tagged: list[TaggedToken],
    links: list[DependencyLink],
    sentence_index: int = 0,
    lexicon: Optional[Lexicon] = None,
) -> list[TermOccurrence]:
    """Leftmost-longest pattern matching over one tagged sentence.

    Patterns, longest first: ADJ+N+Ngen, N+ADJ+Ngen, ADJ+N, N+Ngen, then
    single ABBR or N. A multiword span must carry its licensing links
    (attributive for each ADJ+N pair, possessive for each N..Ngen pair).
    Lemma sequences use dictionary lemmas, except that an adjective takes the
    nominative citation form agreeing with its noun's gender when the lexicon
    has one.
    """
    linkset = {(l.relation, l.head, l.dependent) for l in links}
    n = len(tagged)

    def has_attr(noun: int, adj: int) -> bool:
        return (ATTRIBUTIVE, noun, adj) in linkset

    def has_poss(head: int, dep: int) -> bool:
        return (POSSESSIVE, head, dep) in linkset

    def pos3(i: int) -> tuple:
        return (tagged[i].pos, tagged[i + 1].pos, tagged[i + 2].pos)

    def match3(i: int) -> Optional[str]:
        if pos3(i) == ("ADJ", "NOUN", "NOUN") and has_attr(i + 1, i) and has_poss(i + 1, i + 2):
            return PATTERN_ADJ_N_NGEN
        if pos3(i) == ("NOUN", "ADJ", "NOUN") and has_poss(i, i + 2) and has_attr(i + 2, i + 1):
            return PATTERN_N_ADJ_N
        return None

    def match2(i: int) -> Optional[str]:
        pair = (tagged[i].pos, tagged[i + 1].pos)
        if pair == ("ADJ", "NOUN") and has_attr(i + 1, i):
            return PATTERN_ADJ_N
        if pair == ("NOUN", "NOUN") and has_poss(i, i + 1):
            return PATTERN_N_NGEN
        return None

    def lemmas_for(start: int, end: int) -> tuple[str, ...]:
        out = []
        for p in range(start, end + 1):
            t = tagged[p]
            if t.pos == "ADJ" and p + 1 <= end and tagged[p + 1].pos == "NOUN":
                out.append(_adj_citation(t, tagged[p + 1], lexicon))
            else:
                out.append(t.lemma)
        return tuple(out)

    def occurrence(pattern: str, start: int, end: int) -> TermOccurrence:
        return TermOccurrence(pattern, lemmas_for(start, end), sentence_index, start, end)

    occurrences: list[TermOccurrence] = []
    i = 0
    while i < n:
        pattern = None
        length = 0
        if i + 3 <= n:
            pattern = match3(i)
            length = 3
        if pattern is None and i + 2 <= n:
            pattern = match2(i)
            length = 2
        if pattern is not None:
            multi = [occurrence(pattern, i, i + length - 1)]
            if length == 3:
                # licensed sub-patterns nested in the maximal match
                for s in (i, i + 1):
                    sub = match2(s)
                    if sub is not None:
                        multi.append(occurrence(sub, s, s + 1))
            occurrences.extend(multi)
            for occ in multi:
                for p in range(occ.start, occ.end + 1):
                    if tagged[p].pos == "NOUN":
                        occurrences.append(occurrence(PATTERN_N, p, p))
            i += length
        else:
            if tagged[i].pos == "ABBR":
                occurrences.append(occurrence(PATTERN_ABBR, i, i))
            elif tagged[i].pos == "NOUN":
                occurrences.append(occurrence(PATTERN_N, i, i))
            i += 1
    return occurrences


def analyze_document(doc: Document, lexicon: Lexicon) -> list[SentenceAnalysis]:
    """Tag, link and extract terms for every sentence of a document."""
    analyses = []
    for sentence in doc.sentences:
        tagged = tag(sentence, lexicon)
        links = link(tagged)
        occurrences = extract_terms(tagged, links, sentence.index, lexicon)
        analyses.append(
            SentenceAnalysis(doc.id, sentence.index, tuple(tagged), tuple(links), tuple(occurrences))
        )
    return analyses


def pattern_kind(pattern: str) -> str:
    if pattern == PATTERN_N:
        return termstore.KIND_SINGLE
    if pattern == PATTERN_ABBR:
        return termstore.KIND_ABBR
    return termstore.KIND_MULTI


def aggregate(doc_occurrences: Iterable[tuple[str, Iterable[TermOccurrence]]]) -> "termstore.TermArchive":
    """Group occurrences into a deterministic term archive.

    Frequencies count occurrences, not sentences. Terms are ordered by
    descending frequency, then label, then kind, and numbered t1..tN.
    """
    groups: dict[tuple[str, tuple[str, ...]], dict] = {}
    doc_order: dict[str, int] = {}
    for doc_id, occurrences in doc_occurrences:
        doc_order.setdefault(doc_id, len(doc_order))
        for occ in occurrences:
            key = (pattern_kind(occ.pattern), occ.lemmas)
            group = groups.setdefault(
                key, {"frequency": 0, "sentences": set(), "head": occ.lemmas[_HEAD_OFFSET[occ.pattern]]}
            )
            group["frequency"] += 1
            group["sentences"].add((doc_id, occ.sentence))

    rows = sorted(
        groups.items(), key=lambda kv: (-kv[1]["frequency"], " ".join(kv[0][1]), kv[0][0])
    )
    terms = []
    for ordinal, ((kind, lemmas), group) in enumerate(rows, start=1):
        sentences = tuple(sorted(group["sentences"], key=lambda ds: (doc_order[ds[0]], ds[1])))
        terms.append(
            termstore.Term(
                id=f"t{ordinal}",
                lemmas=lemmas,
                kind=kind,
                frequency=group["frequency"],
                sentences=sentences,
                head_lemma=group["head"],
            )
        )
    return termstore.TermArchive(terms)
