"""Turn loop, player policies, run logging, and template storification.

A session is fully determined by (scenario, policy, seed): the engine core
is deterministic and any randomness lives in seeded policies. The run log
is the replay and learning-analytics surface.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .agents import propose_action, react
from .cases import SuggestionKind
from .drama import DramaManager, NegotiationOutcome
from .errors import ParseError, StoryEngineError
from .fabula import ElementKind, FabulaElement
from .retrieval import Retrieved
from .scenario import StoryElements, load_story_elements
from .simulation import GroundAction, parse_literal

LOG_FORMAT_VERSION = 1


class PlayerPolicy:
    """Supplies the viewpoint character's action each turn."""

    def choose(self, turn: int, available: Sequence[GroundAction]) -> GroundAction:
        raise NotImplementedError


class ScriptedPolicy(PlayerPolicy):
    """Fixed (turn, concept, args) script; Idle on unscripted turns."""

    def __init__(self, moves: Sequence[tuple[int, str, Sequence[str]]]):
        self._moves = {int(t): (c, tuple(a)) for t, c, a in moves}

    def choose(self, turn, available):
        move = self._moves.get(turn)
        if move is None:
            return next(a for a in available if a.concept == "Idle")
        concept, args = move
        for action in available:
            if action.concept == concept and action.args == args:
                return action
        raise StoryEngineError(
            f"scripted action {concept}{args} not available at turn {turn}"
        )


class RandomPolicy(PlayerPolicy):
    """Uniform choice over the applicable repertoire, from a seeded RNG."""

    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def choose(self, turn, available):
        return self._rng.choice(sorted(available, key=GroundAction.key))


def policy_from_file(path, seed: int = 0) -> PlayerPolicy:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict) and doc.get("kind") == "random":
        return RandomPolicy(doc.get("seed", seed))
    try:
        return ScriptedPolicy([(m["turn"], m["concept"], m.get("args", [])) for m in doc])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad policy file {path}: {exc}") from exc


@dataclass
class TurnResult:
    turn: int
    vc_action: dict
    npc_actions: list[dict] = field(default_factory=list)
    opportunities: int = 0
    negotiations: list[dict] = field(default_factory=list)
    applied_cases: list[dict] = field(default_factory=list)
    facts_added: list[str] = field(default_factory=list)
    facts_removed: list[str] = field(default_factory=list)
    terminated: bool = False

    def to_dict(self) -> dict:
        return {
            "turn": self.turn,
            "vc_action": self.vc_action,
            "npc_actions": self.npc_actions,
            "opportunities": self.opportunities,
            "negotiations": self.negotiations,
            "applied_cases": self.applied_cases,
            "facts_added": self.facts_added,
            "facts_removed": self.facts_removed,
            "terminated": self.terminated,
        }


class Session:
    """One playthrough: world + agents + drama manager + turn counter."""

    def __init__(self, elements: StoryElements, seed: int = 0):
        self.elements = elements
        self.seed = seed
        self.world = elements.build_world()
        self.agents = elements.build_agents()
        self.drama = DramaManager(
            vc=elements.vc,
            ontology=elements.ontology,
            library=elements.library,
            active_competences=elements.competences,
            thresholds=elements.config.thresholds,
            retrieval_config=elements.retrieval_config(),
        )
        self.turn = 0
        self.terminated = False
        self.turns: list[TurnResult] = []
        self._goal_fact = (
            parse_literal(elements.config.goal_fact).fact()
            if elements.config.goal_fact
            else None
        )

    # --- queries ---

    @property
    def fabula(self):
        return self.drama.fabula

    def available_vc_actions(self) -> list[GroundAction]:
        return self.world.applicable_actions(self.elements.vc, self.elements.vc_repertoire)

    # --- helpers ---

    def _observe_action(self, action: GroundAction, causes=()) -> FabulaElement:
        if action.actor == self.elements.vc:
            return self.drama.observe_vc_action(action.concept, action.args, self.turn)
        element = FabulaElement(
            id=self.fabula.fresh_id(),
            kind=ElementKind.ACTION,
            concept=action.concept,
            args=action.args,
            turn=self.turn,
            character=action.actor,
        )
        return self.drama.observe(element, causes)

    def _execute_action(self, action: GroundAction, causes=()) -> dict:
        """Apply to the world and record action, outcome, emitted events,
        and NPC reactions in the fabula."""
        action_el = self._observe_action(action, causes)
        result = self.world.apply_action(action)
        outcome_el = FabulaElement(
            id=self.fabula.fresh_id(),
            kind=ElementKind.OUTCOME,
            concept="Success" if result.success else "Failure",
            args=(),
            turn=self.turn,
        )
        self.drama.observe(outcome_el, [action_el.id])
        for event in result.emitted:
            event_el = FabulaElement(
                id=self.fabula.fresh_id(),
                kind=ElementKind.EVENT,
                concept=event.concept,
                args=event.args,
                turn=self.turn,
            )
            self.drama.observe(event_el, [action_el.id])
        if result.success:
            for agent_id in sorted(self.agents):
                for concept, args in react(self.agents[agent_id], action):
                    internal = FabulaElement(
                        id=self.fabula.fresh_id(),
                        kind=ElementKind.INTERNAL_ELEMENT,
                        concept=concept,
                        args=args,
                        turn=self.turn,
                        character=agent_id,
                    )
                    self.drama.observe(internal, [action_el.id])
        return {
            "actor": action.actor,
            "concept": action.concept,
            "args": list(action.args),
            "success": result.success,
            "reason": result.reason,
        }

    def _check_termination(self):
        if self.turn >= self.elements.config.max_turns:
            self.terminated = True
        if self._goal_fact is not None and self._goal_fact in self.world.facts:
            self.terminated = True

    # --- the turn loop ---

    def step(self, vc_action: Optional[GroundAction] = None) -> TurnResult:
        """Advance one turn. Order: VC acts, opportunities are detected,
        NPCs act under negotiation, then at most one goal and one event
        injection, then background processes and the termination check."""
        if self.terminated:
            raise StoryEngineError("session already terminated")
        self.turn += 1
        result = TurnResult(turn=self.turn, vc_action={})
        facts_before = self.world.snapshot()

        # (1) the viewpoint character acts
        if vc_action is None:
            vc_action = GroundAction(self.elements.vc, "Idle", ())
        if vc_action.concept not in ("Idle",) + tuple(self.elements.vc_repertoire):
            raise StoryEngineError(
                f"action {vc_action.concept} is outside the VC repertoire"
            )
        result.vc_action = self._execute_action(vc_action)

        # (2) opportunity detection over what has emerged so far
        opportunities = self.drama.detect_opportunities()
        result.opportunities = sum(
            1 for r in opportunities
            if r.match.interest >= self.elements.config.thresholds.min_interest
        )

        # (3) NPCs act in id order, each through action negotiation;
        # at most one case application on the action channel per turn
        action_channel_used = False
        for agent_id in sorted(self.agents):
            agent = self.agents[agent_id]
            proposed = propose_action(agent, self.world)
            chosen, outcome, retrieved = self.drama.negotiate_action(
                self.turn, agent_id, proposed,
                () if action_channel_used else opportunities,
                self.agents, self.world,
            )
            causes = ()
            if outcome.accepted:
                action_channel_used = True
                causes = self.drama.bound_element_ids(retrieved)
            executed = self._execute_action(chosen, causes)
            result.npc_actions.append(
                {
                    "character": agent_id,
                    "proposed": {"concept": proposed.concept, "args": list(proposed.args)},
                    "executed": executed,
                    "influenced": outcome.accepted,
                }
            )
            result.negotiations.append(outcome.to_dict())

        # (4) at most one goal and one event injection, highest interest first
        result.negotiations.extend(o.to_dict() for o in self._inject(opportunities))

        # (5) background processes
        for event in self.world.step_processes(self.turn):
            event_el = FabulaElement(
                id=self.fabula.fresh_id(),
                kind=ElementKind.EVENT,
                concept=event.concept,
                args=event.args,
                turn=self.turn,
            )
            self.drama.observe(event_el, ())

        # (6) termination
        self._check_termination()
        result.terminated = self.terminated

        facts_after = self.world.snapshot()
        result.facts_added = sorted(str_fact(f) for f in facts_after - facts_before)
        result.facts_removed = sorted(str_fact(f) for f in facts_before - facts_after)
        result.applied_cases = [
            a.to_dict() for a in self.drama.applied_cases if a.turn == self.turn
        ]
        self.turns.append(result)
        return result

    def _inject(self, opportunities: Sequence[Retrieved]) -> list[NegotiationOutcome]:
        outcomes = []
        goal_done = event_done = False
        for retrieved in opportunities:
            if goal_done and event_done:
                break
            if retrieved.match.interest < self.elements.config.thresholds.min_interest:
                continue
            for sugg in retrieved.suggestions:
                if sugg.kind is SuggestionKind.CHARACTER_GOAL and not goal_done:
                    if sugg.target == self.elements.vc:
                        continue
                    goal_done = True
                    outcomes.append(
                        self.drama.negotiate_goal(
                            self.turn, retrieved, sugg, self.agents,
                            self.elements.goal_defs,
                        )
                    )
                elif sugg.kind is SuggestionKind.SIMULATION_EVENT and not event_done:
                    event_done = True
                    outcomes.append(
                        self.drama.negotiate_event(self.turn, retrieved, sugg, self.world)
                    )
        return outcomes

    # --- run log ---

    def run_log(self) -> dict:
        applied = []
        seen = set()
        for a in self.drama.applied_cases:
            key = (a.turn, a.case_id, a.binding)
            if key in seen:
                continue
            seen.add(key)
            applied.append(a.to_dict())
        cfg = self.elements.config
        return {
            "log_format_version": LOG_FORMAT_VERSION,
            "scenario": self.elements.name,
            "scenario_hash": self.elements.content_hash,
            "seed": self.seed,
            "config": {
                "theta_c": cfg.thresholds.min_credibility,
                "theta_i": cfg.thresholds.min_interest,
                "theta_g": cfg.thresholds.min_alignment,
                "max_generalization": cfg.max_generalization,
                "window": cfg.window,
                "max_turns": cfg.max_turns,
            },
            "turns": [t.to_dict() for t in self.turns],
            "applied_cases": applied,
            "channel_log": [a.to_dict() for a in self.drama.applied_cases],
            "fabula": self.fabula.to_dict(),
            "final_facts": sorted(str_fact(f) for f in self.world.facts),
        }

    def run_log_json(self) -> str:
        return json.dumps(self.run_log(), indent=2, sort_keys=True)


def str_fact(fact: tuple) -> str:
    return f"{fact[0]}({', '.join(fact[1:])})"


def run_session(scenario_path, policy: Optional[PlayerPolicy] = None,
                seed: int = 0, elements: Optional[StoryElements] = None) -> dict:
    """Play a full session headless and return the run log."""
    if elements is None:
        elements = load_story_elements(scenario_path)
    policy = policy or ScriptedPolicy([])
    session = Session(elements, seed)
    while not session.terminated:
        action = policy.choose(session.turn + 1, session.available_vc_actions())
        session.step(action)
    return session.run_log()


# --- storification (template text, not language generation) ---

def _describe(element: FabulaElement) -> str:
    args = element.args
    if element.kind is ElementKind.ACTION:
        who = element.character or "someone"
        if len(args) == 0:
            return f"{who} performs {element.concept}."
        if len(args) == 1:
            return f"{who} performs {element.concept} toward {args[0]}."
        if len(args) == 2:
            return f"{who} performs {element.concept} toward {args[0]} regarding {args[1]}."
        return f"{who} performs {element.concept} involving {', '.join(args)}."
    if element.kind is ElementKind.EVENT:
        if args:
            return f"{element.concept} occurs involving {', '.join(args)}."
        return f"{element.concept} occurs."
    if element.kind is ElementKind.INTERNAL_ELEMENT:
        if args:
            return f"{element.character} feels {element.concept} regarding {', '.join(args)}."
        return f"{element.character} feels {element.concept}."
    if element.kind is ElementKind.GOAL:
        if args:
            return f"{element.character} adopts the goal {element.concept} regarding {', '.join(args)}."
        return f"{element.character} adopts the goal {element.concept}."
    if element.kind is ElementKind.PERCEPTION:
        return f"{element.character} perceives {element.concept}."
    return f"The outcome is {element.concept}."


def storify(fabula_or_doc) -> list[str]:
    """One deterministic template line per fabula element, in turn order."""
    if isinstance(fabula_or_doc, dict):
        elements = [
            FabulaElement(
                id=e["id"],
                kind=ElementKind(e["kind"]),
                concept=e["concept"],
                args=tuple(e["args"]),
                turn=int(e["turn"]),
                character=e.get("character"),
            )
            for e in fabula_or_doc["elements"]
        ]
    else:
        elements = sorted(fabula_or_doc.elements, key=lambda e: (e.turn, e.id))
    return [_describe(e) for e in elements]
