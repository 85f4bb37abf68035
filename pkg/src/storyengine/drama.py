"""Drama manager: builds the emerging fabula from world events, detects
case opportunities, and injects narrative control through the three
negotiation channels (character actions, character goals, simulation
events).

Influence is incremental (decisions depend only on what has emerged),
opportune (nothing is suggested when no case applies), and optional (a
session runs to completion with zero applied cases). The drama manager
never writes to the world directly; every mutation passes rule checks or
agent acceptance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .agents import Agent, consider_goal, credibility
from .cases import CaseLibrary, SuggestionKind
from .errors import UnknownCharacterError
from .fabula import ElementKind, Fabula, FabulaElement
from .ontology import Ontology
from .retrieval import ConcreteSuggestion, Retrieved, RetrievalConfig, retrieve
from .simulation import GroundAction, GroundEvent, World


@dataclass(frozen=True)
class ThresholdConfig:
    min_credibility: float = 0.3  # theta_c
    min_interest: float = 0.5     # theta_i
    min_alignment: float = 0.4    # theta_g

    def __post_init__(self):
        for name in ("min_credibility", "min_alignment"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class NegotiationOutcome:
    channel: str  # "action" | "goal" | "event"
    proposal: dict
    accepted: bool
    reason: str  # "accepted" | "rule-violation" | "below-credibility" |
                 # "values-rejection" | "no-acceptable-action" | ...

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "proposal": self.proposal,
            "accepted": self.accepted,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class AppliedCase:
    turn: int
    case_id: str
    binding: tuple
    channel: str
    outcome: str

    def to_dict(self) -> dict:
        return {
            "turn": self.turn,
            "case_id": self.case_id,
            "binding": dict(self.binding[0]),
            "channel": self.channel,
            "outcome": self.outcome,
        }


class DramaManager:
    """One per session; owns the fabula and the applied-case log."""

    def __init__(self, vc: str, ontology: Ontology, library: CaseLibrary,
                 active_competences, thresholds: ThresholdConfig,
                 retrieval_config: RetrievalConfig):
        self.ontology = ontology
        self.library = library
        self.active_competences = frozenset(active_competences)
        self.thresholds = thresholds
        self.retrieval_config = retrieval_config
        self.fabula = Fabula(vc, ontology)
        self.applied_cases: list[AppliedCase] = []
        self._consumed: set[tuple] = set()  # (case id, binding key)

    # --- fabula maintenance ---

    def observe(self, element: FabulaElement, causes: Sequence[str] = ()) -> FabulaElement:
        return self.fabula.append_element(element, causes)

    def observe_vc_action(self, concept: str, args, turn: int) -> FabulaElement:
        return self.fabula.record_vc_action(concept, args, turn)

    # --- opportunity detection ---

    def detect_opportunities(self) -> list[Retrieved]:
        """Current retrieval result, minus case+binding pairs already
        applied in earlier turns."""
        results = retrieve(
            self.fabula, self.library, self.active_competences,
            self.ontology, self.retrieval_config,
        )
        return [
            r for r in results
            if (r.match.case_id, r.match.binding.key()) not in self._consumed
        ]

    def _mark_applied(self, turn: int, retrieved: Retrieved, channel: str, outcome: str):
        match = retrieved.match
        self._consumed.add((match.case_id, match.binding.key()))
        self.applied_cases.append(
            AppliedCase(turn, match.case_id, match.binding.key(), channel, outcome)
        )

    def bound_element_ids(self, retrieved: Retrieved) -> list[str]:
        """Fabula elements the match bound; used as causes of injections."""
        return sorted(fid for _, fid in retrieved.match.binding.elements)

    # --- negotiation channels ---

    def negotiate_action(self, turn: int, character: str, proposed: GroundAction,
                         opportunities: Sequence[Retrieved], agents: dict[str, Agent],
                         world: World) -> tuple[GroundAction, NegotiationOutcome, Optional[Retrieved]]:
        """Pick the most interesting credible suggested action for this NPC,
        falling back to the agent's own proposal untouched."""
        if character == self.fabula.vc:
            raise UnknownCharacterError("the viewpoint character is never negotiated")
        agent = agents.get(character)
        if agent is None:
            raise UnknownCharacterError(character)
        candidates = []
        for retrieved in opportunities:
            if retrieved.match.interest < self.thresholds.min_interest:
                continue
            for sugg in retrieved.suggestions:
                if sugg.kind is not SuggestionKind.CHARACTER_ACTION:
                    continue
                if sugg.target != character:
                    continue
                cred = credibility(agent, sugg.concept, world)
                if cred < self.thresholds.min_credibility:
                    continue
                candidates.append((retrieved, sugg, cred))
        if not candidates:
            return proposed, NegotiationOutcome(
                "action",
                {"character": character, "concept": proposed.concept,
                 "args": list(proposed.args)},
                accepted=False,
                reason="no-acceptable-action",
            ), None
        candidates.sort(
            key=lambda c: (-c[0].match.interest, c[0].match.case_id, c[1].concept)
        )
        retrieved, sugg, _ = candidates[0]
        chosen = GroundAction(character, sugg.concept, sugg.args)
        self._mark_applied(turn, retrieved, "action", "accepted")
        return chosen, NegotiationOutcome(
            "action",
            {"character": character, "concept": sugg.concept, "args": list(sugg.args),
             "case_id": retrieved.match.case_id},
            accepted=True,
            reason="accepted",
        ), retrieved

    def negotiate_goal(self, turn: int, retrieved: Retrieved, sugg: ConcreteSuggestion,
                       agents: dict[str, Agent], goal_defs: dict[str, dict]) -> NegotiationOutcome:
        """Offer a goal to an NPC; its personal values decide adoption."""
        character = sugg.target
        if character == self.fabula.vc:
            raise UnknownCharacterError("the viewpoint character is never negotiated")
        agent = agents.get(character)
        if agent is None:
            raise UnknownCharacterError(character)
        spec = goal_defs.get(sugg.concept, {})
        tags = dict(spec.get("tags", {}))
        priority = float(spec.get("priority", 0.5))
        decision = consider_goal(agent, sugg.concept, tags, priority,
                                 self.thresholds.min_alignment)
        proposal = {"character": character, "concept": sugg.concept,
                    "args": list(sugg.args), "case_id": retrieved.match.case_id,
                    "alignment": decision.alignment}
        if not decision.accepted:
            return NegotiationOutcome("goal", proposal, False, "values-rejection")
        element = FabulaElement(
            id=self.fabula.fresh_id(),
            kind=ElementKind.GOAL,
            concept=sugg.concept,
            args=sugg.args,
            turn=turn,
            character=character,
        )
        self.observe(element, self.bound_element_ids(retrieved))
        self._mark_applied(turn, retrieved, "goal", "accepted")
        return NegotiationOutcome("goal", proposal, True, "accepted")

    def negotiate_event(self, turn: int, retrieved: Retrieved, sugg: ConcreteSuggestion,
                        world: World) -> NegotiationOutcome:
        """Request an event injection; the simulation's rules decide."""
        event = GroundEvent(sugg.concept, sugg.args)
        accepted, reason = world.check_event(event)
        proposal = {"concept": sugg.concept, "args": list(sugg.args),
                    "case_id": retrieved.match.case_id}
        if not accepted:
            return NegotiationOutcome(
                "event", {**proposal, "violated_rule": reason}, False, "rule-violation"
            )
        world.apply_event(event)
        element = FabulaElement(
            id=self.fabula.fresh_id(),
            kind=ElementKind.EVENT,
            concept=sugg.concept,
            args=sugg.args,
            turn=turn,
        )
        self.observe(element, self.bound_element_ids(retrieved))
        self._mark_applied(turn, retrieved, "event", "accepted")
        return NegotiationOutcome("event", proposal, True, "accepted")
