import json
import random

import pytest

from conftest import make_element
from storyengine.errors import (
    ChronologyViolationError,
    DuplicateIdError,
    NonActionConceptError,
    UnknownCauseError,
    VcCauseViolationError,
    VcKindViolationError,
)
from storyengine.fabula import (
    CausalEdge,
    ElementKind,
    Fabula,
    check_invariants,
    import_fabula,
)


def test_append_with_cause(ontology):
    fabula = Fabula("Adam", ontology)
    fabula.record_vc_action("RequestResource", ["Bob", "Herb"], 2)
    request = fabula.elements[0]
    fabula.append_element(
        make_element("u1", "InternalElement", "UnhappyAbout", ["Adam"], 2, "Bob"),
        [request.id],
    )
    assert len(fabula) == 2
    assert fabula.edges == {CausalEdge(request.id, "u1")}


def test_append_to_empty_with_no_causes(ontology):
    fabula = Fabula("Adam", ontology)
    fabula.append_element(make_element("e1", "Event", "RequestAccepted", ["Adam", "Herb"], 0))
    assert len(fabula) == 1
    assert not fabula.edges


def test_vc_kind_violation(ontology):
    fabula = Fabula("Adam", ontology)
    with pytest.raises(VcKindViolationError):
        fabula.append_element(
            make_element("i1", "InternalElement", "UnhappyAbout", ["Bob"], 3, "Adam")
        )


def test_vc_action_cannot_have_causes(ontology):
    fabula = Fabula("Adam", ontology)
    fabula.append_element(make_element("e1", "Event", "RequestAccepted", ["Adam", "Herb"], 0))
    with pytest.raises(VcCauseViolationError):
        fabula.append_element(
            make_element("a1", "Action", "RequestResource", ["Bob", "Herb"], 1, "Adam"),
            ["e1"],
        )


def test_duplicate_id(ontology):
    fabula = Fabula("Adam", ontology)
    element = make_element("e1", "Event", "RequestAccepted", ["Adam", "Herb"], 0)
    fabula.append_element(element)
    with pytest.raises(DuplicateIdError):
        fabula.append_element(element)


def test_unknown_cause(ontology):
    fabula = Fabula("Adam", ontology)
    with pytest.raises(UnknownCauseError):
        fabula.append_element(
            make_element("e1", "Event", "RequestAccepted", ["Adam", "Herb"], 0),
            ["ghost"],
        )


def test_chronology_violation(ontology):
    fabula = Fabula("Adam", ontology)
    fabula.append_element(make_element("e1", "Event", "RequestAccepted", ["Adam", "Herb"], 5))
    with pytest.raises(ChronologyViolationError):
        fabula.append_element(
            make_element("e2", "Event", "RequestAccepted", ["Adam", "Herb"], 4),
            ["e1"],
        )


def test_record_vc_action_has_no_incoming_edges(fixture_fabula):
    vc_actions = [e for e in fixture_fabula.elements if e.character == "Adam"]
    targets = {e.dst for e in fixture_fabula.edges}
    assert vc_actions
    for action in vc_actions:
        assert action.kind is ElementKind.ACTION
        assert action.id not in targets


def test_record_vc_action_rejects_state_concept(ontology):
    fabula = Fabula("Adam", ontology)
    with pytest.raises(NonActionConceptError):
        fabula.record_vc_action("UnhappyAbout", ["Bob"], 1)


def test_successive_vc_actions_stay_unlinked(ontology):
    # oracle: in-degree of every VC node after a scripted run is 0
    fabula = Fabula("Adam", ontology)
    for turn in range(1, 6):
        fabula.record_vc_action("Talk", ["Bob", "Herb"], turn)
    indeg = {e.id: 0 for e in fabula.elements}
    for edge in fabula.edges:
        indeg[edge.dst] += 1
    assert all(v == 0 for v in indeg.values())


def test_recent_window_filters_by_turn(ontology):
    fabula = Fabula("__vc__", ontology)
    for i in range(10):
        fabula.append_element(
            make_element(f"e{i}", "Event", "RequestAccepted", ["Adam", "Herb"], i)
        )
    view = fabula.recent_window(3)
    assert {e.turn for e in view.elements} == {7, 8, 9}


def test_recent_window_saturates(ontology):
    fabula = Fabula("__vc__", ontology)
    for i in range(5):
        fabula.append_element(
            make_element(f"e{i}", "Event", "RequestAccepted", ["Adam", "Herb"], i)
        )
    assert len(fabula.recent_window(1000)) == 5


def test_recent_window_edges_match_brute_force(ontology):
    rng = random.Random(7)
    fabula = Fabula("__vc__", ontology)
    previous = []
    for i in range(20):
        causes = [p for p in previous if rng.random() < 0.3]
        fabula.append_element(
            make_element(f"e{i}", "Event", "RequestAccepted", ["Adam", "Herb"], i // 2),
            causes,
        )
        previous.append(f"e{i}")
    for k in (1, 3, 8):
        view = fabula.recent_window(k)
        kept = {e.id for e in view.elements}
        expected = {e for e in fabula.edges if e.src in kept and e.dst in kept}
        assert view.edges == expected


def test_export_round_trip(fixture_fabula, ontology):
    doc = fixture_fabula.to_dict()
    rebuilt = import_fabula(doc, ontology)
    assert rebuilt.to_dict() == doc
    assert rebuilt.export_json() == fixture_fabula.export_json()


def test_export_empty(ontology):
    fabula = Fabula("Adam", ontology)
    doc = fabula.to_dict()
    assert doc == {"vc": "Adam", "elements": [], "edges": []}


def test_export_deterministic(fixture_fabula):
    assert fixture_fabula.export_json() == fixture_fabula.export_json()


def test_random_append_sequences_stay_dag(ontology):
    rng = random.Random(42)
    for _ in range(50):
        fabula = Fabula("__vc__", ontology)
        previous = []
        for i in range(rng.randint(0, 15)):
            causes = [p for p in previous if rng.random() < 0.3]
            fabula.append_element(
                make_element(
                    f"e{i}", "Event", "RequestAccepted", ["Adam", "Herb"], i
                ),
                causes,
            )
            previous.append(f"e{i}")
        assert check_invariants(fabula) == []


def test_append_only_prefix_property(fixture_fabula, ontology):
    before = fixture_fabula.elements
    fixture_fabula.append_element(
        make_element("x1", "Event", "RequestAccepted", ["Adam", "Herb"], 3)
    )
    assert fixture_fabula.elements[: len(before)] == before
