import copy

import pytest

from storyengine.agents import (
    Agent,
    Goal,
    consider_goal,
    credibility,
    propose_action,
    react,
)
from storyengine.simulation import GroundAction


@pytest.fixture
def world_with_request(meeting_elements):
    world = meeting_elements.build_world()
    world.apply_action(GroundAction("Adam", "RequestResource", ("Bob", "Herb")))
    return world


@pytest.fixture
def bob(meeting_elements):
    return meeting_elements.build_agents()["Bob"]


def test_bob_proposes_refusal(bob, world_with_request):
    assert propose_action(bob, world_with_request) == GroundAction(
        "Bob", "RefuseRequest", ("Adam", "Herb")
    )


def test_empty_goal_set_idles(meeting_elements):
    herb = meeting_elements.build_agents()["Herb"]
    world = meeting_elements.build_world()
    assert propose_action(herb, world) == GroundAction("Herb", "Idle", ())


def test_proposal_matches_exhaustive_scoring(bob, world_with_request):
    # oracle: brute-force evaluation over all applicable ground actions
    candidates = world_with_request.applicable_actions("Bob", bob.repertoire)
    best = min(candidates, key=lambda a: (-bob.goal_score(a.concept), a.concept, a.args))
    assert propose_action(bob, world_with_request) == best


def test_proposal_invariant_under_repertoire_reordering(bob, world_with_request):
    reordered = bob.copy()
    reordered.repertoire = dict(reversed(list(bob.repertoire.items())))
    assert propose_action(bob, world_with_request) == propose_action(
        reordered, world_with_request
    )


def test_credibility_frozen_fixture_value(bob, world_with_request):
    # 0.5 + 0.5 * (-0.5) + 0.6 * 0.5 = 0.55; must clear theta_c = 0.3
    assert credibility(bob, "AcceptRequest", world_with_request) == pytest.approx(0.55)


def test_credibility_in_unit_interval(bob, world_with_request):
    for concept in ("AcceptRequest", "RefuseRequest", "Idle", "Unknown"):
        assert 0.0 <= credibility(bob, concept, world_with_request) <= 1.0


def test_out_of_repertoire_action_is_never_believable(bob, world_with_request):
    assert credibility(bob, "TransferOwnership", world_with_request) == 0.0


def test_credibility_floor_clamps():
    agent = Agent(
        id="x",
        role="",
        goals=[Goal("G", 1.0)],
        values={"v": 1.0},
        repertoire={"Bad": {"G": -1.0}},
        affinities={"Bad": {"v": -1.0}},
    )
    assert credibility(agent, "Bad", None) == 0.0


def test_proposed_action_maximizes_goal_utility_term(bob, world_with_request):
    proposed = propose_action(bob, world_with_request)
    for action in world_with_request.applicable_actions("Bob", bob.repertoire):
        assert bob.goal_score(proposed.concept) >= bob.goal_score(action.concept)


def test_goal_adoption_on_aligned_values(meeting_elements):
    herb = meeting_elements.build_agents()["Herb"]
    decision = consider_goal(herb, "UndermineAdam", {"loyalty": 0.8}, 0.5, 0.4)
    assert decision.accepted
    assert decision.alignment == pytest.approx(0.72)
    assert any(g.concept == "UndermineAdam" for g in herb.goals)


def test_goal_rejection_on_zero_alignment(meeting_elements):
    herb = meeting_elements.build_agents()["Herb"]
    before = copy.deepcopy(herb)
    decision = consider_goal(herb, "UndermineAdam", {"ambition": 0.8}, 0.5, 0.4)
    assert not decision.accepted
    assert decision.alignment == 0.0
    assert herb.goals == before.goals and herb.values == before.values


def test_goal_boundary_alignment_accepts(meeting_elements):
    herb = meeting_elements.build_agents()["Herb"]
    # alignment = 0.9 * (0.4 / 0.9) == threshold exactly
    decision = consider_goal(herb, "UndermineAdam", {"loyalty": 0.4 / 0.9}, 0.5, 0.4)
    assert decision.alignment == pytest.approx(0.4)
    assert decision.accepted


def test_adoption_never_mutates_values(meeting_elements):
    herb = meeting_elements.build_agents()["Herb"]
    values_before = dict(herb.values)
    consider_goal(herb, "UndermineAdam", {"loyalty": 0.8}, 0.5, 0.4)
    assert herb.values == values_before


def test_reaction_trigger(bob):
    action = GroundAction("Adam", "RequestResource", ("Bob", "Herb"))
    assert react(bob, action) == [("UnhappyAbout", ("Adam",))]
    # not the target: silent
    other = GroundAction("Adam", "RequestResource", ("Herb", "Bob"))
    assert react(bob, other) == []
    # own action never triggers a reaction
    own = GroundAction("Bob", "RequestResource", ("Bob", "Herb"))
    assert react(bob, own) == []
