import json
from pathlib import Path

import pytest

from storyengine.fabula import ElementKind, Fabula, FabulaElement
from storyengine.ontology import Concept, Ontology
from storyengine.scenario import load_story_elements

REPO = Path(__file__).resolve().parent.parent

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
MEETING = REPO / "scenarios" / "meeting" / "meeting.scenario"
MEETING_VARIANT = REPO / "scenarios" / "meeting_variant" / "meeting_variant.scenario"
CASE_FILE = REPO / "scenarios" / "meeting" / "conflict_seeding_v1.case.json"


@pytest.fixture(scope="session")
def meeting_elements():
    return load_story_elements(MEETING)


@pytest.fixture(scope="session")
def variant_elements():
    return load_story_elements(MEETING_VARIANT)


@pytest.fixture(scope="session")
def ontology(meeting_elements):
    return meeting_elements.ontology


@pytest.fixture(scope="session")
def conflict_case(meeting_elements):
    return meeting_elements.library.get("conflict_seeding_v1")


@pytest.fixture
def taxonomy():
    """Talk/Discuss under Communicate, a two-level chain, and a state concept."""
    return Ontology(
        [
            Concept("Communicate", None, "action", 2),
            Concept("Talk", "Communicate", "action", 2),
            Concept("Discuss", "Communicate", "action", 2),
            Concept("Whisper", "Talk", "action", 2),
            Concept("UnhappyAbout", None, "state", 1),
        ]
    )


def make_element(fid, kind, concept, args, turn, character=None):
    return FabulaElement(
        id=fid,
        kind=ElementKind(kind),
        concept=concept,
        args=tuple(args),
        turn=turn,
        character=character,
    )


@pytest.fixture
def fixture_fabula(ontology):
    """The emerged context of the worked example: Adam's request causing
    Bob's unhappiness."""
    fabula = Fabula("Adam", ontology)
    fabula.record_vc_action("RequestResource", ["Bob", "Herb"], 2)
    request = fabula.elements[0]
    fabula.append_element(
        make_element("u1", "InternalElement", "UnhappyAbout", ["Adam"], 2, "Bob"),
        [request.id],
    )
    return fabula
