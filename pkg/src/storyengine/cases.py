"""Authored narrative cases: partial fabula patterns with variables,
suggestion payloads, a narrative concept, and competence tags.

Case ingestion enforces the two authoring constraints: a case demonstrates
a named narrative concept, and its context is complete for that concept
and nothing more (structurally: connected context, no dangling or unused
variables).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import ParseError, UnknownConceptError, ValidationFailureError
from .fabula import ElementKind
from .ontology import Ontology

VARIABLE_SORTS = ("character", "resource", "location")


def is_variable(term: str) -> bool:
    return isinstance(term, str) and term.startswith("?")


@dataclass(frozen=True)
class PatternVariable:
    name: str
    sort: str


@dataclass(frozen=True)
class PatternElement:
    id: str
    kind: ElementKind
    concept: str
    args: tuple[str, ...]  # variable names or entity literals
    character: Optional[str] = None  # variable name or literal
    instantiated: bool = True

    def terms(self) -> tuple[str, ...]:
        if self.character is None:
            return self.args
        return (self.character,) + self.args


class SuggestionKind(str, enum.Enum):
    CHARACTER_ACTION = "CharacterAction"
    CHARACTER_GOAL = "CharacterGoal"
    SIMULATION_EVENT = "SimulationEvent"


@dataclass(frozen=True)
class Suggestion:
    kind: SuggestionKind
    concept: str
    args: tuple[str, ...]
    target: Optional[str] = None  # character variable; absent for SimulationEvent

    def terms(self) -> tuple[str, ...]:
        if self.target is None:
            return self.args
        return (self.target,) + self.args


@dataclass(frozen=True)
class PatternEdge:
    src: str
    dst: str


@dataclass(frozen=True)
class Case:
    id: str
    narrative_concept: str
    competences: frozenset[str]
    variables: tuple[PatternVariable, ...]
    context: tuple[PatternElement, ...]
    context_edges: tuple[PatternEdge, ...]
    suggestions: tuple[Suggestion, ...]

    def variable_names(self) -> set[str]:
        return {v.name for v in self.variables}

    def variable_sort(self, name: str) -> Optional[str]:
        for v in self.variables:
            if v.name == name:
                return v.sort
        return None


def validate_case(case: Case, ontology: Optional[Ontology] = None) -> list[str]:
    """Return the list of violated constraints (empty means pass)."""
    violations = []
    if not case.narrative_concept:
        violations.append("constraint 1: narrative_concept is empty")
    if not case.competences:
        violations.append("case has no competence tags")
    if not case.suggestions:
        violations.append("case has no suggestions")
    if not case.context:
        violations.append("case has an empty context")

    declared = case.variable_names()
    if len(declared) != len(case.variables):
        violations.append("duplicate variable names")

    context_vars = set()
    for el in case.context:
        for term in el.terms():
            if is_variable(term):
                context_vars.add(term)
                if term not in declared:
                    violations.append(f"undeclared variable {term} in context element {el.id}")
    suggestion_vars = set()
    for i, s in enumerate(case.suggestions):
        for term in s.terms():
            if is_variable(term):
                suggestion_vars.add(term)
                if term not in declared:
                    violations.append(f"undeclared variable {term} in suggestion {i}")
                elif term not in context_vars:
                    violations.append(
                        f"constraint 2: suggestion variable {term} does not appear in context"
                    )
    for name in sorted(declared - context_vars - suggestion_vars):
        violations.append(f"constraint 2: variable {name} is unused")

    # context graph must be weakly connected ("all the elements necessary
    # ... and nothing more"): elements are linked by causal edges or by a
    # shared variable
    ids = {el.id for el in case.context}
    if len(ids) != len(case.context):
        violations.append("duplicate context element ids")
    for edge in case.context_edges:
        if edge.src not in ids or edge.dst not in ids:
            violations.append(f"context edge {edge.src}->{edge.dst} references unknown element")
    if case.context and not violations:
        neighbors: dict[str, set[str]] = {el.id: set() for el in case.context}
        for edge in case.context_edges:
            neighbors[edge.src].add(edge.dst)
            neighbors[edge.dst].add(edge.src)
        for a in case.context:
            for b in case.context:
                if a.id != b.id and set(filter(is_variable, a.terms())) & set(
                    filter(is_variable, b.terms())
                ):
                    neighbors[a.id].add(b.id)
        stack = [case.context[0].id]
        reached = set()
        while stack:
            node = stack.pop()
            if node in reached:
                continue
            reached.add(node)
            stack.extend(neighbors[node])
        if reached != ids:
            violations.append("constraint 2: context is not connected")

    if ontology is not None:
        for el in case.context:
            if el.concept not in ontology:
                violations.append(f"unknown concept {el.concept} in context element {el.id}")
            elif ontology.get(el.concept).arity != len(el.args):
                violations.append(f"arity mismatch on context element {el.id}")
        for i, s in enumerate(case.suggestions):
            if s.concept not in ontology:
                violations.append(f"unknown concept {s.concept} in suggestion {i}")
            elif s.kind in (SuggestionKind.CHARACTER_ACTION, SuggestionKind.SIMULATION_EVENT):
                if not ontology.is_action(s.concept):
                    violations.append(f"suggestion {i} concept {s.concept} is not an action")
    return violations


class CaseLibrary:
    """Cases indexed by id and by competence; immutable after load."""

    def __init__(self, cases: Sequence[Case] = ()):
        self._by_id: dict[str, Case] = {}
        self._by_competence: dict[str, list[str]] = {}
        for case in cases:
            if case.id in self._by_id:
                raise ParseError(f"duplicate case id {case.id!r}")
            self._by_id[case.id] = case
            for comp in case.competences:
                self._by_competence.setdefault(comp, []).append(case.id)
        for ids in self._by_competence.values():
            ids.sort()

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, case_id: str) -> bool:
        return case_id in self._by_id

    def get(self, case_id: str) -> Case:
        return self._by_id[case_id]

    @property
    def case_ids(self) -> list[str]:
        return sorted(self._by_id)

    @property
    def competences(self) -> list[str]:
        return sorted(self._by_competence)

    def cases_for_competences(self, competences) -> list[Case]:
        """Union over the requested competences, ordered by case id."""
        ids: set[str] = set()
        for comp in competences:
            ids.update(self._by_competence.get(comp, ()))
        return [self._by_id[cid] for cid in sorted(ids)]


def case_from_dict(doc: dict) -> Case:
    try:
        variables = tuple(
            PatternVariable(v["name"], v["sort"]) for v in doc.get("variables", [])
        )
        elements = tuple(
            PatternElement(
                id=e["id"],
                kind=ElementKind(e["kind"]),
                concept=e["concept"],
                args=tuple(e.get("args", [])),
                character=e.get("character"),
                instantiated=bool(e.get("instantiated", True)),
            )
            for e in doc["context"]["elements"]
        )
        edges = tuple(
            PatternEdge(e["from"], e["to"]) for e in doc["context"].get("edges", [])
        )
        suggestions = tuple(
            Suggestion(
                kind=SuggestionKind(s["kind"]),
                concept=s["concept"],
                args=tuple(s.get("args", [])),
                target=s.get("target"),
            )
            for s in doc["suggestions"]
        )
        return Case(
            id=doc["id"],
            narrative_concept=doc["narrative_concept"],
            competences=frozenset(doc["competences"]),
            variables=variables,
            context=elements,
            context_edges=edges,
            suggestions=suggestions,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad case document: {exc}") from exc


def case_to_dict(case: Case) -> dict:
    return {
        "id": case.id,
        "narrative_concept": case.narrative_concept,
        "competences": sorted(case.competences),
        "variables": [{"name": v.name, "sort": v.sort} for v in case.variables],
        "context": {
            "elements": [
                {
                    "id": e.id,
                    "kind": e.kind.value,
                    "character": e.character,
                    "concept": e.concept,
                    "args": list(e.args),
                    "instantiated": e.instantiated,
                }
                for e in case.context
            ],
            "edges": [{"from": e.src, "to": e.dst} for e in case.context_edges],
        },
        "suggestions": [
            {
                "kind": s.kind.value,
                "target": s.target,
                "concept": s.concept,
                "args": list(s.args),
            }
            for s in case.suggestions
        ],
    }


def load_cases(documents: Sequence[dict], ontology: Ontology) -> CaseLibrary:
    """Build a library; any case failing validation is rejected outright."""
    cases = []
    for doc in documents:
        case = case_from_dict(doc)
        violations = validate_case(case, ontology)
        if violations:
            raise ValidationFailureError(case.id, violations)
        cases.append(case)
    return CaseLibrary(cases)


def load_case_files(paths, ontology: Ontology) -> CaseLibrary:
    documents = []
    for path in paths:
        try:
            documents.append(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    return load_cases(documents, ontology)
