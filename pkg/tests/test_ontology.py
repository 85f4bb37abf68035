import pytest

from storyengine.errors import (
    ArityMismatchError,
    CycleInTaxonomyError,
    DanglingParentError,
    UnknownConceptError,
)
from storyengine.ontology import Concept, Ontology, ontology_from_dict


def test_generalize_talk_to_communicate(taxonomy):
    assert taxonomy.generalize("Talk", 1) == "Communicate"
    assert taxonomy.generalize("Discuss", 1) == "Communicate"


def test_generalize_clamps_at_root(taxonomy):
    assert taxonomy.generalize("Communicate", 1) == "Communicate"
    assert taxonomy.generalize("Whisper", 10) == "Communicate"


def test_generalize_zero_is_identity(taxonomy):
    for cid in taxonomy.concept_ids:
        assert taxonomy.generalize(cid, 0) == cid


def test_generalize_walks_parent_links(taxonomy):
    # oracle: manual parent-chain walk
    assert taxonomy.generalize("Whisper", 1) == "Talk"
    assert taxonomy.generalize("Whisper", 2) == "Communicate"


def test_depth_monotonicity(taxonomy):
    for cid in taxonomy.concept_ids:
        for steps in range(4):
            got = taxonomy.depth(taxonomy.generalize(cid, steps))
            assert got == max(0, taxonomy.depth(cid) - steps)


def test_is_descendant(taxonomy):
    assert taxonomy.is_descendant("Talk", "Communicate")
    assert taxonomy.is_descendant("Talk", "Talk")
    assert not taxonomy.is_descendant("Communicate", "Talk")
    assert not taxonomy.is_descendant("Discuss", "Talk")


def test_descendant_antisymmetry(taxonomy):
    for a in taxonomy.concept_ids:
        for b in taxonomy.concept_ids:
            if taxonomy.is_descendant(a, b) and taxonomy.is_descendant(b, a):
                assert a == b


def test_enough_steps_reaches_a_root(taxonomy):
    for cid in taxonomy.concept_ids:
        assert taxonomy.generalize(cid, taxonomy.depth(cid)) in taxonomy.roots


def test_unknown_concept():
    ont = Ontology([])
    with pytest.raises(UnknownConceptError):
        ont.generalize("Nope", 1)
    with pytest.raises(UnknownConceptError):
        ont.is_descendant("Idle", "Nope")


def test_cycle_detection():
    with pytest.raises(CycleInTaxonomyError):
        Ontology(
            [Concept("A", "B", "action", 1), Concept("B", "A", "action", 1)]
        )


def test_dangling_parent():
    with pytest.raises(DanglingParentError):
        Ontology([Concept("A", "Ghost", "action", 1)])


def test_child_arity_must_match_parent():
    with pytest.raises(ArityMismatchError):
        Ontology(
            [Concept("A", None, "action", 2), Concept("B", "A", "action", 1)]
        )


def test_empty_document_is_valid():
    ont = ontology_from_dict({"concepts": []})
    # builtins only
    assert "Idle" in ont
    assert ont.get("Idle").arity == 0


def test_load_from_dict():
    ont = ontology_from_dict(
        {
            "concepts": [
                {"id": "Communicate", "parent": None, "kind": "action", "arity": 2},
                {"id": "Talk", "parent": "Communicate", "kind": "action", "arity": 2},
                {"id": "Discuss", "parent": "Communicate", "kind": "action", "arity": 2},
            ]
        }
    )
    assert "Communicate" in ont.roots
    assert ont.generalize("Talk", 1) == "Communicate"


def test_descendants_sorted(taxonomy):
    assert taxonomy.descendants("Communicate") == [
        "Communicate", "Discuss", "Talk", "Whisper",
    ]
