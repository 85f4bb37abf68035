"""Case retrieval pipeline: generalize the emerged fabula, match case
contexts by variable binding, apply the inverse transformations to adapt
suggestions, and score narrative interest.

Generalization is applied on the fabula side: a pattern concept applies to
a fabula element whose concept it equals, or of which it is an ancestor
within the configured number of steps. Matches are therefore monotone in
the generalization budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .cases import Case, CaseLibrary, Suggestion, SuggestionKind, is_variable
from .errors import UnboundVariableError
from .fabula import Fabula, FabulaView
from .ontology import Ontology


@dataclass(frozen=True)
class RetrievalConfig:
    max_generalization: int = 2       # G: per-element generalization budget
    window: Optional[int] = 8         # k: matching horizon in turns; None = whole fabula
    specificity_weight: float = 0.5
    recency_weight: float = 0.5
    recent_turns: int = 2
    vocabulary: frozenset[str] = frozenset()  # scenario's concrete action/event concepts
    entity_sorts: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class TransformationStep:
    element_id: str        # fabula element id
    original: str          # concept recorded in the fabula
    generalized: str       # concept the pattern matched at
    steps: int


@dataclass(frozen=True)
class Binding:
    variables: tuple[tuple[str, str], ...]  # (pattern variable, entity id), sorted
    elements: tuple[tuple[str, str], ...]   # (pattern element id, fabula element id), sorted

    def variable_map(self) -> dict[str, str]:
        return dict(self.variables)

    def element_map(self) -> dict[str, str]:
        return dict(self.elements)

    def key(self) -> tuple:
        return (self.variables, self.elements)


@dataclass(frozen=True)
class Match:
    case_id: str
    binding: Binding
    generalization_cost: int
    transformations: tuple[TransformationStep, ...]
    interest: float = 0.0


@dataclass(frozen=True)
class ConcreteSuggestion:
    """A suggestion with every variable resolved to a scenario entity."""

    kind: SuggestionKind
    concept: str
    args: tuple[str, ...]
    target: Optional[str] = None


@dataclass(frozen=True)
class Retrieved:
    match: Match
    suggestions: tuple[ConcreteSuggestion, ...]


def generalize_fabula(view: FabulaView, ontology: Ontology, max_steps: int):
    """Admissible concepts per element (ancestors up to the budget) plus a
    transformation log seeded with the identity transformation."""
    admissible: dict[str, list[tuple[str, int]]] = {}
    log = []
    for element in view.elements:
        chain = [(element.concept, 0)]
        current = element.concept
        for step in range(1, max_steps + 1):
            parent = ontology.generalize(current, 1)
            if parent == current:
                break
            chain.append((parent, step))
            current = parent
        admissible[element.id] = chain
        log.append(TransformationStep(element.id, element.concept, element.concept, 0))
    return admissible, tuple(log)


def _sort_of(entity: str, config: RetrievalConfig) -> Optional[str]:
    return config.entity_sorts.get(entity) if config.entity_sorts else None


def _bind_term(pattern_term: str, value: str, var_map: dict, case: Case,
               config: RetrievalConfig) -> bool:
    """Extend var_map in place; False on conflict or sort mismatch."""
    if not is_variable(pattern_term):
        return pattern_term == value
    bound = var_map.get(pattern_term)
    if bound is not None:
        return bound == value
    want = case.variable_sort(pattern_term)
    have = _sort_of(value, config)
    if want is not None and have is not None and want != have:
        return False
    var_map[pattern_term] = value
    return True


def match_pattern(case: Case, view: FabulaView, ontology: Ontology,
                  max_steps: Optional[int] = None,
                  config: Optional[RetrievalConfig] = None) -> list[Match]:
    """All bindings of the case's instantiated context onto the view.

    Uninstantiated pattern elements contribute structure only and are never
    bound; edges incident to them are not checked.
    """
    config = config or RetrievalConfig()
    budget = config.max_generalization if max_steps is None else max_steps
    pattern = sorted((el for el in case.context if el.instantiated), key=lambda e: e.id)
    if not pattern:
        return []
    admissible, _ = generalize_fabula(view, ontology, budget)
    pattern_ids = {el.id for el in pattern}
    edges = [(e.src, e.dst) for e in case.context_edges
             if e.src in pattern_ids and e.dst in pattern_ids]
    results = []

    def extend(idx: int, var_map: dict, el_map: dict, cost: int,
               steps_used: list[TransformationStep]):
        if idx == len(pattern):
            binding = Binding(
                variables=tuple(sorted(var_map.items())),
                elements=tuple(sorted(el_map.items())),
            )
            results.append(Match(case.id, binding, cost, tuple(steps_used)))
            return
        pel = pattern[idx]
        used = set(el_map.values())
        for fel in view.elements:
            if fel.id in used or fel.kind is not pel.kind:
                continue
            steps = next((s for c, s in admissible[fel.id] if c == pel.concept), None)
            if steps is None:
                continue
            if len(fel.args) != len(pel.args):
                continue
            trial = dict(var_map)
            if pel.character is None:
                if fel.character is not None:
                    continue
            else:
                if fel.character is None:
                    continue
                if not _bind_term(pel.character, fel.character, trial, case, config):
                    continue
            ok = all(
                _bind_term(pt, ft, trial, case, config)
                for pt, ft in zip(pel.args, fel.args)
            )
            if not ok:
                continue
            new_el_map = dict(el_map)
            new_el_map[pel.id] = fel.id
            # pattern edges among already-bound elements must exist in the fabula
            if any(
                (a in new_el_map and b in new_el_map)
                and not view.has_edge(new_el_map[a], new_el_map[b])
                for a, b in edges
            ):
                continue
            step_rec = TransformationStep(fel.id, fel.concept, pel.concept, steps)
            extend(idx + 1, trial, new_el_map, cost + steps, steps_used + [step_rec])

    extend(0, {}, {}, 0, [])
    order = [el.id for el in pattern]
    results.sort(key=lambda m: tuple(m.binding.element_map()[pid] for pid in order))
    return results


def interest_score(match: Match, view: FabulaView,
                   config: Optional[RetrievalConfig] = None) -> float:
    """Blend of specificity (how little generalization the match needed)
    and recency (how much of it sits in the last few turns)."""
    config = config or RetrievalConfig()
    bound = [fid for _, fid in match.binding.elements]
    if not bound:
        return 0.0
    budget = config.max_generalization
    if budget == 0:
        specificity = 1.0
    else:
        specificity = 1.0 - match.generalization_cost / (budget * len(bound))
    by_id = {e.id: e for e in view.elements}
    horizon = view.max_turn() - config.recent_turns + 1
    recent = sum(1 for fid in bound if by_id[fid].turn >= horizon)
    recency = recent / len(bound)
    return config.specificity_weight * specificity + config.recency_weight * recency


def adapt(case: Case, match: Match, ontology: Ontology,
          config: Optional[RetrievalConfig] = None) -> tuple[ConcreteSuggestion, ...]:
    """Substitute the binding into the case's suggestions and invert any
    generalization by specializing abstract concepts into the scenario's
    concrete vocabulary (deterministically, lowest concept id first)."""
    config = config or RetrievalConfig()
    var_map = match.binding.variable_map()

    def resolve(term: str) -> str:
        if not is_variable(term):
            return term
        try:
            return var_map[term]
        except KeyError:
            raise UnboundVariableError(
                f"suggestion in case {case.id} references unbound variable {term}"
            ) from None

    def specialize(concept: str) -> str:
        if match.generalization_cost == 0 or not config.vocabulary:
            return concept
        if concept in config.vocabulary:
            return concept
        candidates = [c for c in ontology.descendants(concept) if c in config.vocabulary]
        return candidates[0] if candidates else concept

    out = []
    for s in case.suggestions:
        out.append(
            ConcreteSuggestion(
                kind=s.kind,
                concept=specialize(s.concept),
                args=tuple(resolve(t) for t in s.args),
                target=resolve(s.target) if s.target is not None else None,
            )
        )
    return tuple(out)


def retrieve(fabula: Fabula, library: CaseLibrary, active_competences,
             ontology: Ontology, config: Optional[RetrievalConfig] = None) -> list[Retrieved]:
    """Matches for every case under the active competences over the recent
    window, adapted and scored, best first. Pure in its inputs."""
    config = config or RetrievalConfig()
    view = fabula.view() if config.window is None else fabula.recent_window(config.window)
    results = []
    for case in library.cases_for_competences(active_competences):
        for match in match_pattern(case, view, ontology, config=config):
            scored = replace(match, interest=interest_score(match, view, config))
            suggestions = adapt(case, scored, ontology, config)
            results.append(Retrieved(scored, suggestions))
    results.sort(key=lambda r: (-r.match.interest, r.match.case_id, r.match.binding.key()))
    return results
