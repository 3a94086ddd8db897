"""Ontology graphs: concepts, typed relations, validation, edits, drafting.

Relations carry one of five types. The is-a subgraph must stay acyclic;
everything else may form whatever shape the engineer wants. Edits are
transactional: an edit that would leave the graph invalid is rejected with a
reason and the original graph is untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .errors import OkbError
from .analyzer import OBJECTIVE, POSSESSIVE, SentenceAnalysis, pattern_kind
from .termstore import Term, KIND_SINGLE, KIND_MULTI

IS_A = "is-a"
OBJECT = "object"
PART_OF = "part-of"
ATTRIBUTE = "attribute"
ASSOCIATED = "associated"
RELATION_TYPES = (IS_A, OBJECT, PART_OF, ATTRIBUTE, ASSOCIATED)

SOURCE_EXTRACTED = "extracted"
SOURCE_MANUAL = "manual"

# which link relations draft which edge types
_LINK_EDGE_TYPES = {POSSESSIVE: PART_OF, OBJECTIVE: OBJECT}


class OntologyError(OkbError):
    pass


class EditError(OntologyError):
    pass


@dataclass(frozen=True)
class Concept:
    id: str
    label: str
    source: str = SOURCE_MANUAL


@dataclass(frozen=True)
class Relation:
    id: str
    type: str
    from_id: str
    to_id: str


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    ids: tuple[str, ...] = ()


@dataclass
class OntologyGraph:
    name: str
    concepts: list[Concept] = field(default_factory=list)
    relations: list[Relation] = field(default_factory=list)

    def concept(self, concept_id: str) -> Concept:
        for c in self.concepts:
            if c.id == concept_id:
                return c
        raise OntologyError(f"no such concept: {concept_id}")

    def copy(self) -> "OntologyGraph":
        return OntologyGraph(self.name, list(self.concepts), list(self.relations))


def _isa_cycles(graph: OntologyGraph) -> list[tuple[str, ...]]:
    """Strongly connected components of size > 1 in the is-a subgraph."""
    adjacency: dict[str, list[str]] = {}
    for rel in graph.relations:
        if rel.type == IS_A:
            adjacency.setdefault(rel.from_id, []).append(rel.to_id)
            adjacency.setdefault(rel.to_id, [])
    # Tarjan, iterative
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]
    components: list[tuple[str, ...]] = []

    for root in adjacency:
        if root in index:
            continue
        work = [(root, iter(adjacency[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, successors = work[-1]
            advanced = False
            for succ in successors:
                if succ not in index:
                    index[succ] = low[succ] = counter[0]
                    counter[0] += 1
                    stack.append(succ)
                    on_stack.add(succ)
                    work.append((succ, iter(adjacency[succ])))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1:
                    components.append(tuple(sorted(component)))
    return sorted(components)


def validate(graph: OntologyGraph) -> list[Violation]:
    """All invariant violations; an empty list means the graph is sound."""
    violations: list[Violation] = []
    seen_concepts: set[str] = set()
    for c in graph.concepts:
        if c.id in seen_concepts:
            violations.append(Violation("duplicate-concept-id", f"concept id {c.id} repeats", (c.id,)))
        seen_concepts.add(c.id)
        if not c.label.strip():
            violations.append(Violation("empty-label", f"concept {c.id} has an empty label", (c.id,)))
        if c.source not in (SOURCE_EXTRACTED, SOURCE_MANUAL):
            violations.append(Violation("bad-source", f"concept {c.id} has source {c.source!r}", (c.id,)))

    seen_relations: set[str] = set()
    seen_triples: set[tuple[str, str, str]] = set()
    for r in graph.relations:
        if r.id in seen_relations:
            violations.append(Violation("duplicate-relation-id", f"relation id {r.id} repeats", (r.id,)))
        seen_relations.add(r.id)
        if r.type not in RELATION_TYPES:
            violations.append(Violation("bad-type", f"relation {r.id} has type {r.type!r}", (r.id,)))
        for endpoint in (r.from_id, r.to_id):
            if endpoint not in seen_concepts:
                violations.append(
                    Violation("dangling-endpoint", f"relation {r.id} references unknown concept {endpoint}", (r.id, endpoint))
                )
        if r.from_id == r.to_id:
            violations.append(Violation("self-relation", f"relation {r.id} loops on {r.from_id}", (r.id,)))
        triple = (r.type, r.from_id, r.to_id)
        if triple in seen_triples:
            violations.append(
                Violation("duplicate-relation", f"duplicate {r.type} relation {r.from_id} -> {r.to_id}", (r.id,))
            )
        seen_triples.add(triple)

    for component in _isa_cycles(graph):
        violations.append(
            Violation("isa-cycle", "is-a cycle through " + ", ".join(component), component)
        )
    return violations


def topological_order(graph: OntologyGraph) -> list[str]:
    """Concept ids in a child-before-parent order over is-a edges.

    Raises OntologyError when the is-a subgraph has a cycle.
    """
    indegree = {c.id: 0 for c in graph.concepts}
    adjacency: dict[str, list[str]] = {c.id: [] for c in graph.concepts}
    for r in graph.relations:
        if r.type == IS_A:
            adjacency[r.from_id].append(r.to_id)
            indegree[r.to_id] += 1
    queue = sorted(cid for cid, deg in indegree.items() if deg == 0)
    order = []
    while queue:
        node = queue.pop(0)
        order.append(node)
        for succ in sorted(adjacency[node]):
            indegree[succ] -= 1
            if indegree[succ] == 0:
                queue.append(succ)
    if len(order) != len(indegree):
        raise OntologyError("is-a subgraph has a cycle")
    return order


def _next_id(prefix: str, taken: Iterable[str]) -> str:
    numbers = set()
    for item in taken:
        if item.startswith(prefix) and item[len(prefix):].isdigit():
            numbers.add(int(item[len(prefix):]))
    n = 1
    while n in numbers:
        n += 1
    return f"{prefix}{n}"


def apply_edit(graph: OntologyGraph, edit: Mapping) -> OntologyGraph:
    """Apply one edit and return a new graph; reject anything unsound.

    Edits are mappings with an ``op`` key:
      {"op": "add_concept", "label": ..., "id"?: ..., "source"?: ...}
      {"op": "rename_concept", "id": ..., "label": ...}
      {"op": "remove_concept", "id": ...}   (drops incident relations)
      {"op": "add_relation", "type": ..., "from": ..., "to": ..., "id"?: ...}
      {"op": "remove_relation", "id": ...}
    """
    op = edit.get("op")
    new = graph.copy()

    def required(key: str) -> str:
        value = edit.get(key)
        if not isinstance(value, str) or not value:
            raise EditError(f"edit {op!r} needs a {key!r} string")
        return value

    if op == "add_concept":
        label = required("label")
        cid = edit.get("id") or _next_id("c", (c.id for c in new.concepts))
        source = edit.get("source", SOURCE_MANUAL)
        new.concepts.append(Concept(cid, label, source))
    elif op == "rename_concept":
        cid, label = required("id"), required("label")
        for i, c in enumerate(new.concepts):
            if c.id == cid:
                new.concepts[i] = replace(c, label=label)
                break
        else:
            raise EditError(f"no such concept: {cid}")
    elif op == "remove_concept":
        cid = required("id")
        if all(c.id != cid for c in new.concepts):
            raise EditError(f"no such concept: {cid}")
        new.concepts = [c for c in new.concepts if c.id != cid]
        new.relations = [r for r in new.relations if cid not in (r.from_id, r.to_id)]
    elif op == "add_relation":
        rtype = required("type")
        from_id, to_id = required("from"), required("to")
        rid = edit.get("id") or _next_id("r", (r.id for r in new.relations))
        new.relations.append(Relation(rid, rtype, from_id, to_id))
    elif op == "remove_relation":
        rid = required("id")
        if all(r.id != rid for r in new.relations):
            raise EditError(f"no such relation: {rid}")
        new.relations = [r for r in new.relations if r.id != rid]
    else:
        raise EditError(f"unknown edit op: {op!r}")

    violations = validate(new)
    if violations:
        raise EditError(violations[0].message)
    return new


def build_draft(
    name: str,
    selection: list[Term],
    analyses: Iterable[SentenceAnalysis],
) -> OntologyGraph:
    """Draft an ontology from the selected terms and the corpus analysis.

    One concept per selected term. Edges: is-a from a selected multiword term
    to the selected single term matching its head noun; part-of/object from
    possessive/objective links whose head and dependent tokens head
    occurrences of two distinct selected terms; associated between selected
    terms that co-occur in some sentence with no dependency link between
    their head tokens there and no other drafted edge between them
    (deduplicated, directed from the smaller label to the larger).
    """
    if not selection:
        raise OntologyError("nothing selected")

    ordered = sorted(selection, key=lambda t: (t.label, t.kind))
    concept_of: dict[str, str] = {}
    concepts = []
    for i, term in enumerate(ordered, start=1):
        cid = f"c{i}"
        concept_of[term.id] = cid
        concepts.append(Concept(cid, term.label, SOURCE_EXTRACTED))

    selected_keys = {(t.kind, t.lemmas): t for t in selection}
    single_by_lemma = {t.lemmas[0]: t for t in selection if t.kind == KIND_SINGLE}

    edges: set[tuple[str, str, str]] = set()

    for term in selection:
        if term.kind != KIND_MULTI:
            continue
        head = single_by_lemma.get(term.head_lemma)
        if head is not None and head.id != term.id:
            edges.add((IS_A, concept_of[term.id], concept_of[head.id]))

    cooccur: dict[tuple[str, str], bool] = {}  # concept id pair -> linkless co-occurrence seen
    for analysis in analyses:
        heads: dict[int, set[str]] = {}
        present: dict[str, set[int]] = {}
        for occ in analysis.occurrences:
            term = selected_keys.get((pattern_kind(occ.pattern), occ.lemmas))
            if term is None:
                continue
            cid = concept_of[term.id]
            heads.setdefault(occ.head_index, set()).add(cid)
            present.setdefault(cid, set()).add(occ.head_index)

        linked_tokens = {(l.head, l.dependent) for l in analysis.links}
        for l in analysis.links:
            edge_type = _LINK_EDGE_TYPES.get(l.relation)
            if edge_type is None:
                continue
            for from_cid in heads.get(l.head, ()):
                for to_cid in heads.get(l.dependent, ()):
                    if from_cid != to_cid:
                        edges.add((edge_type, from_cid, to_cid))

        ids = sorted(present)
        for a_i in range(len(ids)):
            for b_i in range(a_i + 1, len(ids)):
                a, b = ids[a_i], ids[b_i]
                if any(
                    (ha, hb) in linked_tokens or (hb, ha) in linked_tokens
                    for ha in present[a]
                    for hb in present[b]
                ):
                    continue
                key = (a, b)
                cooccur[key] = True

    label_of = {c.id: c.label for c in concepts}
    for a, b in sorted(cooccur):
        if any(t for t, f, to in edges if {f, to} == {a, b} and t != ASSOCIATED):
            continue
        first, second = sorted((a, b), key=lambda cid: label_of[cid])
        edges.add((ASSOCIATED, first, second))

    relations = []
    def _num(cid: str) -> int:
        return int(cid[1:])
    for i, (rtype, from_id, to_id) in enumerate(
        sorted(edges, key=lambda e: (e[0], _num(e[1]), _num(e[2]))), start=1
    ):
        relations.append(Relation(f"r{i}", rtype, from_id, to_id))

    graph = OntologyGraph(name, concepts, relations)
    problems = validate(graph)
    if problems:
        raise OntologyError("draft failed validation: " + problems[0].message)
    return graph
