"""Ontology exchange formats: canonical KVP XML and an OWL (RDF/XML) subset.

KVP is the flat interchange schema:

    <?xml version="1.0" encoding="UTF-8"?>
    <kvp-ontology name="NAME">
      <concept id="c1" label="..."/>
      <relation id="r1" type="is-a" from="c2" to="c1"/>
    </kvp-ontology>

Emission is canonical: concepts sorted by label, ids reassigned c1../r1..,
fixed attribute order, two-space indent, LF line ends, UTF-8. Parsing is
strict and reports the offending element and line.

The OWL subset covers owl:Class with rdfs:label, rdfs:subClassOf to a named
class (is-a), and subclass-of-Restriction with owl:onProperty /
owl:someValuesFrom, where the property local name picks the relation type.
Anything else is skipped with a warning; an unknown restriction property
degrades to an "associated" relation, also with a warning.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from xml.parsers import expat
from xml.sax.saxutils import escape

from .errors import OkbError
from .ontology import (
    ASSOCIATED,
    ATTRIBUTE,
    IS_A,
    OBJECT,
    PART_OF,
    RELATION_TYPES,
    SOURCE_MANUAL,
    Concept,
    OntologyGraph,
    Relation,
    validate,
)

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"

_PROPERTY_TYPES = {
    "object": OBJECT,
    "partOf": PART_OF,
    "attribute": ATTRIBUTE,
    "associated": ASSOCIATED,
}
_TYPE_PROPERTIES = {v: k for k, v in _PROPERTY_TYPES.items()}

_CONCEPT_ID_RE = re.compile(r"^c[0-9]+$")
_RELATION_ID_RE = re.compile(r"^r[0-9]+$")


class ConvertError(OkbError):
    pass


def _attr(value: str) -> str:
    return escape(value, {'"': "&quot;"})


# ---------------------------------------------------------------- KVP

def emit_kvp(graph: OntologyGraph) -> str:
    """Canonical KVP serialization of a valid graph."""
    problems = validate(graph)
    if problems:
        raise ConvertError("invalid graph: " + problems[0].message)

    ordered = sorted(graph.concepts, key=lambda c: (c.label, c.id))
    new_ids = {c.id: f"c{i}" for i, c in enumerate(ordered, start=1)}
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<kvp-ontology name="{_attr(graph.name)}">',
    ]
    for i, concept in enumerate(ordered, start=1):
        lines.append(f'  <concept id="c{i}" label="{_attr(concept.label)}"/>')
    rel_rows = sorted(
        (
            (r.type, int(new_ids[r.from_id][1:]), int(new_ids[r.to_id][1:]))
            for r in graph.relations
        ),
    )
    for i, (rtype, from_n, to_n) in enumerate(rel_rows, start=1):
        lines.append(
            f'  <relation id="r{i}" type="{rtype}" from="c{from_n}" to="c{to_n}"/>'
        )
    lines.append("</kvp-ontology>")
    return "\n".join(lines) + "\n"


class _KvpParser:
    """Flat expat-based parser so schema errors can name their line."""

    def __init__(self) -> None:
        self.name: str | None = None
        self.concepts: list[Concept] = []
        self.relations: list[tuple[Relation, int]] = []
        self.depth = 0
        parser = expat.ParserCreate()
        parser.StartElementHandler = self._start
        parser.EndElementHandler = self._end
        parser.CharacterDataHandler = self._text
        self._parser = parser

    def _fail(self, message: str) -> None:
        raise ConvertError(f"{message} (line {self._parser.CurrentLineNumber})")

    def _start(self, tag: str, attrs: dict[str, str]) -> None:
        self.depth += 1
        if self.depth == 1:
            if tag != "kvp-ontology":
                self._fail(f"expected root element kvp-ontology, found {tag!r}")
            if set(attrs) != {"name"} or not attrs["name"].strip():
                self._fail("kvp-ontology needs exactly one attribute: a non-empty name")
            self.name = attrs["name"]
            return
        if self.depth > 2:
            self._fail(f"unexpected nested element {tag!r}")
        if tag == "concept":
            if set(attrs) != {"id", "label"}:
                self._fail("concept needs exactly the attributes id and label")
            if not _CONCEPT_ID_RE.match(attrs["id"]):
                self._fail(f"bad concept id {attrs['id']!r}")
            if any(c.id == attrs["id"] for c in self.concepts):
                self._fail(f"duplicate concept id {attrs['id']!r}")
            if not attrs["label"].strip():
                self._fail(f"concept {attrs['id']} has an empty label")
            self.concepts.append(Concept(attrs["id"], attrs["label"], SOURCE_MANUAL))
        elif tag == "relation":
            if set(attrs) != {"id", "type", "from", "to"}:
                self._fail("relation needs exactly the attributes id, type, from, to")
            if not _RELATION_ID_RE.match(attrs["id"]):
                self._fail(f"bad relation id {attrs['id']!r}")
            if attrs["type"] not in RELATION_TYPES:
                self._fail(f"unknown relation type {attrs['type']!r}")
            self.relations.append(
                (
                    Relation(attrs["id"], attrs["type"], attrs["from"], attrs["to"]),
                    self._parser.CurrentLineNumber,
                )
            )
        else:
            self._fail(f"unexpected element {tag!r}")

    def _end(self, tag: str) -> None:
        self.depth -= 1

    def _text(self, data: str) -> None:
        if data.strip():
            self._fail(f"unexpected text {data.strip()!r}")

    def parse(self, text: str) -> OntologyGraph:
        try:
            self._parser.Parse(text, True)
        except expat.ExpatError as exc:
            raise ConvertError(f"malformed XML: {exc}") from exc
        if self.name is None:
            raise ConvertError("empty document: no kvp-ontology element")
        known = {c.id for c in self.concepts}
        seen_rel_ids: set[str] = set()
        seen_triples: set[tuple[str, str, str]] = set()
        relations = []
        for relation, line in self.relations:
            for endpoint in (relation.from_id, relation.to_id):
                if endpoint not in known:
                    raise ConvertError(f"unknown concept id {endpoint!r} (line {line})")
            if relation.id in seen_rel_ids:
                raise ConvertError(f"duplicate relation id {relation.id!r} (line {line})")
            seen_rel_ids.add(relation.id)
            if relation.from_id == relation.to_id:
                raise ConvertError(f"relation {relation.id} loops on {relation.from_id} (line {line})")
            triple = (relation.type, relation.from_id, relation.to_id)
            if triple in seen_triples:
                raise ConvertError(f"duplicate relation {triple} (line {line})")
            seen_triples.add(triple)
            relations.append(relation)
        graph = OntologyGraph(self.name, self.concepts, relations)
        problems = validate(graph)
        if problems:
            raise ConvertError(problems[0].message)
        return graph


def parse_kvp(text: str) -> OntologyGraph:
    """Parse KVP XML, enforcing the full schema; errors name element and line."""
    return _KvpParser().parse(text)


# ---------------------------------------------------------------- OWL

def _fragment(iri: str) -> str:
    if "#" in iri:
        return iri.rsplit("#", 1)[1]
    return iri.rstrip("/").rsplit("/", 1)[-1]


def parse_owl(text: str) -> tuple[OntologyGraph, list[str]]:
    """Parse the OWL subset; returns (graph, warnings).

    Classes become concepts (rdfs:label, else the IRI fragment). Named
    rdfs:subClassOf becomes is-a; Restriction subclassing becomes a typed
    relation picked by the onProperty local name, degrading to "associated"
    (with a warning) for unknown properties. Unrecognized constructs are
    skipped with warnings.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ConvertError(f"malformed XML: {exc}") from exc

    warnings: list[str] = []
    name = "ontology"
    concepts: dict[str, Concept] = {}
    order: list[str] = []
    pending: list[tuple[str, str, str]] = []

    def class_id(element: ET.Element) -> str | None:
        about = element.get(f"{{{RDF_NS}}}about")
        if about is not None:
            return _fragment(about)
        rdf_id = element.get(f"{{{RDF_NS}}}ID")
        if rdf_id is not None:
            return rdf_id
        return None

    def ensure_concept(cid: str, label: str | None = None) -> None:
        if cid not in concepts:
            concepts[cid] = Concept(cid, label or cid, SOURCE_MANUAL)
            order.append(cid)
        elif label is not None:
            concepts[cid] = Concept(cid, label, SOURCE_MANUAL)

    for element in root:
        tag = element.tag
        if tag == f"{{{OWL_NS}}}Ontology":
            label = element.findtext(f"{{{RDFS_NS}}}label")
            if label:
                name = label
            continue
        if tag != f"{{{OWL_NS}}}Class":
            warnings.append(f"skipped element {tag}")
            continue
        cid = class_id(element)
        if cid is None:
            warnings.append("skipped owl:Class without rdf:about or rdf:ID")
            continue
        label = element.findtext(f"{{{RDFS_NS}}}label")
        ensure_concept(cid, label)
        for child in element:
            if child.tag == f"{{{RDFS_NS}}}label":
                continue
            if child.tag != f"{{{RDFS_NS}}}subClassOf":
                warnings.append(f"skipped {child.tag} on class {cid}")
                continue
            resource = child.get(f"{{{RDF_NS}}}resource")
            if resource is not None:
                parent = _fragment(resource)
                pending.append((IS_A, cid, parent))
                continue
            restriction = child.find(f"{{{OWL_NS}}}Restriction")
            if restriction is None:
                warnings.append(f"skipped subClassOf without resource or Restriction on {cid}")
                continue
            on_property = restriction.find(f"{{{OWL_NS}}}onProperty")
            target = restriction.find(f"{{{OWL_NS}}}someValuesFrom")
            if on_property is None or target is None:
                warnings.append(f"skipped incomplete Restriction on {cid}")
                continue
            prop_iri = on_property.get(f"{{{RDF_NS}}}resource", "")
            target_iri = target.get(f"{{{RDF_NS}}}resource", "")
            if not prop_iri or not target_iri:
                warnings.append(f"skipped incomplete Restriction on {cid}")
                continue
            prop = _fragment(prop_iri)
            rel_type = _PROPERTY_TYPES.get(prop)
            if rel_type is None:
                warnings.append(f"unknown property {prop!r} on {cid}, treating as associated")
                rel_type = ASSOCIATED
            pending.append((rel_type, cid, _fragment(target_iri)))

    for rel_type, from_id, to_id in pending:
        ensure_concept(from_id)
        ensure_concept(to_id)

    relations = []
    seen_triples: set[tuple[str, str, str]] = set()
    for rel_type, from_id, to_id in pending:
        triple = (rel_type, from_id, to_id)
        if triple in seen_triples:
            warnings.append(f"skipped duplicate {rel_type} {from_id} -> {to_id}")
            continue
        seen_triples.add(triple)
        relations.append(Relation(f"r{len(relations) + 1}", rel_type, from_id, to_id))

    graph = OntologyGraph(name, [concepts[cid] for cid in order], relations)
    problems = validate(graph)
    if problems:
        raise ConvertError(problems[0].message)
    return graph, warnings


def emit_owl(graph: OntologyGraph) -> str:
    """Deterministic RDF/XML for a valid graph, labels tagged xml:lang="uk"."""
    problems = validate(graph)
    if problems:
        raise ConvertError("invalid graph: " + problems[0].message)

    by_from: dict[str, list[Relation]] = {}
    for relation in graph.relations:
        by_from.setdefault(relation.from_id, []).append(relation)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"',
        '         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"',
        '         xmlns:owl="http://www.w3.org/2002/07/owl#">',
        '  <owl:Ontology rdf:about="">',
        f'    <rdfs:label>{escape(graph.name)}</rdfs:label>',
        "  </owl:Ontology>",
    ]
    for concept in sorted(graph.concepts, key=lambda c: c.id):
        lines.append(f'  <owl:Class rdf:about="#{_attr(concept.id)}">')
        lines.append(f'    <rdfs:label xml:lang="uk">{escape(concept.label)}</rdfs:label>')
        for relation in sorted(by_from.get(concept.id, ()), key=lambda r: (r.type, r.to_id)):
            if relation.type == IS_A:
                lines.append(f'    <rdfs:subClassOf rdf:resource="#{_attr(relation.to_id)}"/>')
            else:
                prop = _TYPE_PROPERTIES[relation.type]
                lines.append("    <rdfs:subClassOf>")
                lines.append("      <owl:Restriction>")
                lines.append(f'        <owl:onProperty rdf:resource="#{prop}"/>')
                lines.append(f'        <owl:someValuesFrom rdf:resource="#{_attr(relation.to_id)}"/>')
                lines.append("      </owl:Restriction>")
                lines.append("    </rdfs:subClassOf>")
        lines.append("  </owl:Class>")
    lines.append("</rdf:RDF>")
    return "\n".join(lines) + "\n"


def convert(text: str, source: str, target: str) -> tuple[str, list[str]]:
    """Convert between formats ("kvp", "owl"); returns (output, warnings)."""
    if source not in ("kvp", "owl") or target not in ("kvp", "owl"):
        raise ConvertError(f"unsupported conversion {source!r} -> {target!r}")
    if source == target:
        raise ConvertError("source and target formats are the same")
    warnings: list[str] = []
    if source == "kvp":
        graph = parse_kvp(text)
    else:
        graph, warnings = parse_owl(text)
    output = emit_kvp(graph) if target == "kvp" else emit_owl(graph)
    return output, warnings
