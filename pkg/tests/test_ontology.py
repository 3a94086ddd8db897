"""Graph validation, cycle detection, transactional edits and drafting."""

import random

import pytest

from okb.analyzer import analyze_document
from okb.ontology import (
    Concept,
    EditError,
    OntologyError,
    OntologyGraph,
    Relation,
    apply_edit,
    build_draft,
    topological_order,
    validate,
)
from okb.termstore import set_selected


def g(concepts, relations=(), name="тест"):
    return OntologyGraph(
        name,
        [Concept(cid, label) for cid, label in concepts],
        [Relation(rid, t, f, to) for rid, t, f, to in relations],
    )


def test_valid_graph_has_no_violations():
    graph = g(
        [("c1", "а"), ("c2", "б"), ("c3", "в")],
        [("r1", "is-a", "c2", "c1"), ("r2", "part-of", "c3", "c2"), ("r3", "associated", "c1", "c3")],
    )
    assert validate(graph) == []


@pytest.mark.parametrize(
    "concepts,relations,kind",
    [
        ([("c1", "а"), ("c1", "б")], [], "duplicate-concept-id"),
        ([("c1", "  ")], [], "empty-label"),
        ([("c1", "а")], [("r1", "near", "c1", "c1")], "bad-type"),
        ([("c1", "а")], [("r1", "is-a", "c1", "c9")], "dangling-endpoint"),
        ([("c1", "а")], [("r1", "associated", "c1", "c1")], "self-relation"),
        (
            [("c1", "а"), ("c2", "б")],
            [("r1", "is-a", "c1", "c2"), ("r2", "is-a", "c1", "c2")],
            "duplicate-relation",
        ),
        (
            [("c1", "а"), ("c2", "б")],
            [("r1", "is-a", "c1", "c2"), ("r1", "is-a", "c2", "c1")],
            "duplicate-relation-id",
        ),
        (
            [("c1", "а"), ("c2", "б")],
            [("r1", "is-a", "c1", "c2"), ("r2", "is-a", "c2", "c1")],
            "isa-cycle",
        ),
    ],
)
def test_violation_kinds(concepts, relations, kind):
    assert kind in {v.kind for v in validate(g(concepts, relations))}


def test_bad_source_is_reported():
    graph = OntologyGraph("т", [Concept("c1", "а", source="guess")], [])
    assert {v.kind for v in validate(graph)} == {"bad-source"}


def test_isa_cycle_reported_once_per_component():
    graph = g(
        [("c1", "а"), ("c2", "б"), ("c3", "в"), ("c4", "г")],
        [
            ("r1", "is-a", "c1", "c2"),
            ("r2", "is-a", "c2", "c3"),
            ("r3", "is-a", "c3", "c1"),
            ("r4", "is-a", "c4", "c1"),
        ],
    )
    cycles = [v for v in validate(graph) if v.kind == "isa-cycle"]
    assert len(cycles) == 1
    assert cycles[0].ids == ("c1", "c2", "c3")


def test_cycles_in_other_relation_types_are_allowed():
    graph = g(
        [("c1", "а"), ("c2", "б")],
        [("r1", "part-of", "c1", "c2"), ("r2", "part-of", "c2", "c1")],
    )
    assert validate(graph) == []


def test_topological_order():
    graph = g(
        [("c1", "корінь"), ("c2", "середина"), ("c3", "лист"), ("c4", "окремо")],
        [("r1", "is-a", "c2", "c1"), ("r2", "is-a", "c3", "c2")],
    )
    order = topological_order(graph)
    assert order.index("c3") < order.index("c2") < order.index("c1")
    assert set(order) == {"c1", "c2", "c3", "c4"}
    with pytest.raises(OntologyError, match="cycle"):
        topological_order(
            g([("c1", "а"), ("c2", "б")], [("r1", "is-a", "c1", "c2"), ("r2", "is-a", "c2", "c1")])
        )


def _brute_force_has_isa_cycle(graph) -> bool:
    adjacency = {}
    for r in graph.relations:
        if r.type == "is-a":
            adjacency.setdefault(r.from_id, set()).add(r.to_id)

    def reachable(start, target, seen):
        for nxt in adjacency.get(start, ()):
            if nxt == target:
                return True
            if nxt not in seen:
                seen.add(nxt)
                if reachable(nxt, target, seen):
                    return True
        return False

    return any(reachable(cid, cid, set()) for cid in {c.id for c in graph.concepts})


def test_cycle_detection_matches_brute_force_on_small_graphs():
    rng = random.Random(81517)
    for _ in range(400):
        n = rng.randint(1, 8)
        concepts = [(f"c{i + 1}", f"к{i + 1}") for i in range(n)]
        triples = set()
        for _ in range(rng.randint(0, 12)):
            a, b = rng.randint(1, n), rng.randint(1, n)
            if a != b:
                triples.add(("is-a", f"c{a}", f"c{b}"))
        relations = [(f"r{i + 1}", *t) for i, t in enumerate(sorted(triples))]
        graph = g(concepts, relations)
        tarjan_says = any(v.kind == "isa-cycle" for v in validate(graph))
        assert tarjan_says == _brute_force_has_isa_cycle(graph)


# --------------------------------------------------------------- edits

@pytest.fixture
def base():
    return g(
        [("c1", "пристрій"), ("c2", "комп'ютер")],
        [("r1", "is-a", "c2", "c1")],
    )


def test_add_concept_generates_free_id(base):
    new = apply_edit(base, {"op": "add_concept", "label": "сервер"})
    assert [c.id for c in new.concepts] == ["c1", "c2", "c3"]
    again = apply_edit(new, {"op": "add_concept", "label": "шафа", "id": "c9"})
    assert again.concepts[-1].id == "c9"


def test_rename_concept(base):
    new = apply_edit(base, {"op": "rename_concept", "id": "c1", "label": "устаткування"})
    assert new.concept("c1").label == "устаткування"
    with pytest.raises(EditError, match="no such concept"):
        apply_edit(base, {"op": "rename_concept", "id": "c8", "label": "х"})


def test_remove_concept_drops_incident_relations(base):
    new = apply_edit(base, {"op": "remove_concept", "id": "c1"})
    assert [c.id for c in new.concepts] == ["c2"]
    assert new.relations == []


def test_add_and_remove_relation(base):
    new = apply_edit(base, {"op": "add_relation", "type": "associated", "from": "c1", "to": "c2"})
    assert len(new.relations) == 2
    assert new.relations[-1].id == "r2"
    back = apply_edit(new, {"op": "remove_relation", "id": "r2"})
    assert [r.id for r in back.relations] == ["r1"]
    with pytest.raises(EditError, match="no such relation"):
        apply_edit(base, {"op": "remove_relation", "id": "r9"})


def test_edit_rejects_resulting_invalid_graph(base):
    with pytest.raises(EditError, match="cycle"):
        apply_edit(base, {"op": "add_relation", "type": "is-a", "from": "c1", "to": "c2"})
    with pytest.raises(EditError, match="unknown concept|dangling|references"):
        apply_edit(base, {"op": "add_relation", "type": "is-a", "from": "c1", "to": "c7"})
    with pytest.raises(EditError, match="duplicate"):
        apply_edit(base, {"op": "add_relation", "type": "is-a", "from": "c2", "to": "c1"})


def test_rejected_edit_leaves_original_untouched(base):
    snapshot = base.copy()
    with pytest.raises(EditError):
        apply_edit(base, {"op": "add_relation", "type": "is-a", "from": "c1", "to": "c2"})
    assert base == snapshot


def test_unknown_op_and_missing_fields(base):
    with pytest.raises(EditError, match="unknown edit op"):
        apply_edit(base, {"op": "explode"})
    with pytest.raises(EditError, match="needs a 'label' string"):
        apply_edit(base, {"op": "add_concept"})


def test_random_edit_sequences_never_yield_invalid_graphs(base):
    rng = random.Random(4242)
    ops = ["add_concept", "rename_concept", "remove_concept", "add_relation", "remove_relation"]
    graph = base
    applied = 0
    for i in range(500):
        op = rng.choice(ops)
        edit = {"op": op}
        if op == "add_concept":
            edit["label"] = f"поняття{i}"
        elif op == "rename_concept":
            edit["id"] = f"c{rng.randint(1, 10)}"
            edit["label"] = f"нове{i}"
        elif op == "remove_concept":
            edit["id"] = f"c{rng.randint(1, 10)}"
        elif op == "add_relation":
            edit["type"] = rng.choice(["is-a", "object", "part-of", "attribute", "associated", "near"])
            edit["from"] = f"c{rng.randint(1, 10)}"
            edit["to"] = f"c{rng.randint(1, 10)}"
        else:
            edit["id"] = f"r{rng.randint(1, 10)}"
        try:
            graph = apply_edit(graph, edit)
            applied += 1
        except EditError:
            continue
        assert validate(graph) == []
    assert applied > 50  # the sequence must actually exercise the happy path


# --------------------------------------------------------------- drafting

def _draft_for(archive, analyses, labels):
    for label in labels:
        set_selected(archive, archive.find(label).id, True)
    selection = [t for t in archive.terms if t.selected]
    return build_draft("проба", selection, analyses)


def test_draft_from_fig_basket_matches_frozen_graph(archive, analyses):
    graph = _draft_for(
        archive,
        analyses,
        ["обчислювальна система", "обчислювальна техніка", "пристрій", "комп'ютер", "конфігурація"],
    )
    assert [(c.id, c.label) for c in graph.concepts] == [
        ("c1", "комп'ютер"),
        ("c2", "конфігурація"),
        ("c3", "обчислювальна система"),
        ("c4", "обчислювальна техніка"),
        ("c5", "пристрій"),
    ]
    assert [(r.id, r.type, r.from_id, r.to_id) for r in graph.relations] == [
        ("r1", "associated", "c1", "c3"),
        ("r2", "associated", "c1", "c5"),
        ("r3", "associated", "c2", "c3"),
        ("r4", "associated", "c4", "c5"),
        ("r5", "part-of", "c5", "c3"),
    ]
    assert all(c.source == "extracted" for c in graph.concepts)
    assert validate(graph) == []


def test_draft_isa_from_head_noun(archive, analyses):
    graph = _draft_for(archive, analyses, ["система", "обчислювальна система"])
    assert [(c.label) for c in graph.concepts] == ["обчислювальна система", "система"]
    assert [(r.type, r.from_id, r.to_id) for r in graph.relations] == [("is-a", "c1", "c2")]


def test_draft_part_of_suppresses_associated(archive, analyses):
    graph = _draft_for(archive, analyses, ["склад", "обчислювальна система"])
    assert [(r.type,) for r in graph.relations] == [("part-of",)]
    from_label = graph.concept(graph.relations[0].from_id).label
    to_label = graph.concept(graph.relations[0].to_id).label
    assert (from_label, to_label) == ("склад", "обчислювальна система")


def test_draft_requires_selection(archive, analyses):
    with pytest.raises(OntologyError, match="nothing selected"):
        build_draft("п", [], analyses)


def test_draft_object_edge_from_objective_link(lexicon):
    from okb.corpus import ingest_document

    doc = ingest_document("Вони реєструють переміщення елементів конструкції.", "t", doc_id="d1")
    analyses = analyze_document(doc, lexicon)
    from okb.analyzer import aggregate

    archive = aggregate([("d1", [o for a in analyses for o in a.occurrences])])
    set_selected(archive, archive.find("переміщення").id, True)
    # a verb precedes the selected noun within the window: an object edge
    # can only appear when the verb itself heads a selected term, which a
    # noun-only selection can never produce
    graph = build_draft("п", [t for t in archive.terms if t.selected], analyses)
    assert [r.type for r in graph.relations] == []
