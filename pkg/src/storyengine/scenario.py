"""Story Elements loader: competences, roles, processes, rules,
environment, and case references, bundled into everything a session needs.

A scenario is one JSON document referencing its ontology and case files by
relative path.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .agents import Agent, Goal, Reaction
from .cases import CaseLibrary, load_case_files
from .drama import ThresholdConfig
from .errors import (
    DanglingCaseRefError,
    MissingVcError,
    MultipleVcError,
    ParseError,
    UnknownConceptError,
)
from .ontology import Ontology, load_ontology
from .retrieval import RetrievalConfig
from .simulation import (
    ActionSchema,
    EventSchema,
    Process,
    Rule,
    World,
    action_schema_from_dict,
    event_schema_from_dict,
    fact_from_text,
    process_from_dict,
    rule_from_dict,
)


@dataclass(frozen=True)
class ScenarioConfig:
    thresholds: ThresholdConfig
    max_generalization: int = 2
    window: Optional[int] = 8
    max_turns: int = 20
    goal_fact: Optional[str] = None  # session also ends when this fact holds
    specificity_weight: float = 0.5
    recency_weight: float = 0.5
    recent_turns: int = 2


@dataclass
class StoryElements:
    name: str
    path: Optional[str]
    content_hash: str
    competences: frozenset[str]
    vc: str
    agents: dict[str, Agent]          # NPCs only
    vc_repertoire: tuple[str, ...]
    ontology: Ontology
    library: CaseLibrary
    entities: dict[str, str]
    relations: dict[str, int]
    initial_facts: list
    actions: tuple[ActionSchema, ...]
    events: tuple[EventSchema, ...]
    rules: tuple[Rule, ...]
    processes: tuple[Process, ...]
    goal_defs: dict[str, dict]        # goal concept -> {"tags": ..., "priority": ...}
    config: ScenarioConfig

    def build_world(self) -> World:
        return World(
            entities=self.entities,
            facts=self.initial_facts,
            actions=self.actions,
            events=self.events,
            rules=self.rules,
            processes=self.processes,
        )

    def build_agents(self) -> dict[str, Agent]:
        return {aid: agent.copy() for aid, agent in self.agents.items()}

    def retrieval_config(self) -> RetrievalConfig:
        return RetrievalConfig(
            max_generalization=self.config.max_generalization,
            window=self.config.window,
            specificity_weight=self.config.specificity_weight,
            recency_weight=self.config.recency_weight,
            recent_turns=self.config.recent_turns,
            vocabulary=self.vocabulary(),
            entity_sorts=dict(self.entities),
        )

    def vocabulary(self) -> frozenset[str]:
        """Concrete action/event concepts this scenario can realize."""
        return frozenset(
            [a.concept for a in self.actions] + [e.concept for e in self.events]
        )


def _agent_from_role(doc: dict) -> Agent:
    goals = [
        Goal(
            concept=g["concept"],
            priority=float(g["priority"]),
            tags=tuple(sorted(g.get("tags", {}).items())),
        )
        for g in doc.get("goals", [])
    ]
    repertoire = {
        r["concept"]: {k: float(v) for k, v in r.get("utilities", {}).items()}
        for r in doc.get("repertoire", [])
    }
    reactions = tuple(
        Reaction(
            on=r["on"],
            concept=r["concept"],
            args=tuple(r.get("args", [])),
            self_arg=r.get("self_arg"),
        )
        for r in doc.get("reactions", [])
    )
    return Agent(
        id=doc["id"],
        role=doc.get("role", ""),
        goals=goals,
        values={k: float(v) for k, v in doc.get("values", {}).items()},
        repertoire=repertoire,
        affinities={
            c: {k: float(v) for k, v in a.items()}
            for c, a in doc.get("affinities", {}).items()
        },
        reactions=reactions,
    )


def load_story_elements(path) -> StoryElements:
    path = Path(path)
    raw = path.read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    base = path.parent

    ontology = load_ontology(base / doc["ontology"])

    case_paths = []
    for ref in doc.get("cases", []):
        case_path = base / ref
        if not case_path.exists():
            raise DanglingCaseRefError(str(case_path))
        case_paths.append(case_path)
    library = load_case_files(case_paths, ontology)

    roles = doc.get("roles", [])
    vcs = [r["id"] for r in roles if r.get("vc")]
    if not vcs:
        raise MissingVcError("scenario declares no viewpoint character")
    if len(vcs) > 1:
        raise MultipleVcError(f"multiple viewpoint characters: {vcs}")
    vc = vcs[0]
    agents = {}
    vc_repertoire: tuple[str, ...] = ()
    for role in roles:
        agent = _agent_from_role(role)
        if role.get("vc"):
            vc_repertoire = tuple(sorted(agent.repertoire))
        else:
            agents[agent.id] = agent

    env = doc.get("environment", {})
    entities = {e["id"]: e["sort"] for e in env.get("entities", [])}
    relations = {r["name"]: int(r["arity"]) for r in env.get("relations", [])}
    initial_facts = [fact_from_text(f) for f in env.get("facts", [])]
    actions = tuple(action_schema_from_dict(a) for a in env.get("actions", []))
    events = tuple(event_schema_from_dict(e) for e in env.get("events", []))
    rules = tuple(rule_from_dict(r) for r in doc.get("rules", []))
    processes = tuple(process_from_dict(p) for p in doc.get("processes", []))

    for schema in actions + events:
        if schema.concept not in ontology:
            raise UnknownConceptError(schema.concept)
    for agent in agents.values():
        for concept in agent.repertoire:
            if concept not in ontology:
                raise UnknownConceptError(concept)
    for concept in vc_repertoire:
        if concept not in ontology:
            raise UnknownConceptError(concept)

    goal_defs = {
        g["concept"]: {"tags": g.get("tags", {}), "priority": g.get("priority", 0.5)}
        for g in doc.get("goals", [])
    }

    cfg = doc.get("config", {})
    config = ScenarioConfig(
        thresholds=ThresholdConfig(
            min_credibility=float(cfg.get("theta_c", 0.3)),
            min_interest=float(cfg.get("theta_i", 0.5)),
            min_alignment=float(cfg.get("theta_g", 0.4)),
        ),
        max_generalization=int(cfg.get("max_generalization", 2)),
        window=cfg.get("window", 8),
        max_turns=int(cfg.get("max_turns", 20)),
        goal_fact=cfg.get("goal_fact"),
        specificity_weight=float(cfg.get("specificity_weight", 0.5)),
        recency_weight=float(cfg.get("recency_weight", 0.5)),
        recent_turns=int(cfg.get("recent_turns", 2)),
    )

    return StoryElements(
        name=doc.get("name", path.stem),
        path=str(path),
        content_hash=hashlib.sha256(raw).hexdigest(),
        competences=frozenset(doc.get("competences", [])),
        vc=vc,
        agents=agents,
        vc_repertoire=vc_repertoire,
        ontology=ontology,
        library=library,
        entities=entities,
        relations=relations,
        initial_facts=initial_facts,
        actions=actions,
        events=events,
        rules=rules,
        processes=processes,
        goal_defs=goal_defs,
        config=config,
    )


def validate_scenario(elements: StoryElements) -> list[str]:
    """Authoring lint: warnings, not failures. Empty report means pass."""
    report = []
    for case_id in elements.library.case_ids:
        case = elements.library.get(case_id)
        if not case.competences & elements.competences:
            report.append(
                f"case {case_id} is unreachable: no overlap with declared competences"
            )
    known_relations = set(elements.relations) | {f[0] for f in elements.initial_facts}
    known_relations |= {
        lit.relation
        for schema in elements.actions + elements.events
        for lit in schema.add + schema.remove
    }
    for rule in elements.rules:
        for lit in rule.pre:
            if lit.relation not in known_relations:
                report.append(f"rule {rule.id} references undeclared relation {lit.relation}")
    repertoires = set(elements.vc_repertoire)
    for agent in elements.agents.values():
        repertoires.update(agent.repertoire)
    for schema in elements.actions:
        if not (schema.add or schema.remove or schema.emits):
            report.append(f"action {schema.concept} has no effects")
        if schema.concept not in repertoires:
            report.append(f"action {schema.concept} is in no agent's repertoire")
    return report
