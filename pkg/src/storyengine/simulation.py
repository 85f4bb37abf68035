"""Symbolic world simulation: ground facts, preconditioned actions with
add/remove effects, rule-gated event injection, and periodic processes.

Rules are vetoes: an injected event is accepted iff every rule scoped to
its concept holds on the current facts. The core is fully deterministic.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ParseError, SimulationError, UnknownEventConceptError

Fact = tuple  # (relation, arg, arg, ...)

_LITERAL_RE = re.compile(r"^(!)?\s*([A-Za-z_]\w*)\s*\(([^)]*)\)\s*$")


@dataclass(frozen=True)
class Literal:
    relation: str
    terms: tuple[str, ...]
    negated: bool = False

    def substitute(self, binding: dict) -> "Literal":
        return Literal(
            self.relation,
            tuple(binding.get(t, t) for t in self.terms),
            self.negated,
        )

    def is_ground(self) -> bool:
        return not any(t.startswith("?") for t in self.terms)

    def fact(self) -> Fact:
        return (self.relation,) + self.terms

    def __str__(self) -> str:
        neg = "!" if self.negated else ""
        return f"{neg}{self.relation}({', '.join(self.terms)})"


def parse_literal(text: str) -> Literal:
    m = _LITERAL_RE.match(text)
    if not m:
        raise ParseError(f"bad literal: {text!r}")
    neg, relation, inner = m.groups()
    terms = tuple(t.strip() for t in inner.split(",")) if inner.strip() else ()
    return Literal(relation, terms, negated=bool(neg))


def parse_literals(texts: Iterable[str]) -> tuple[Literal, ...]:
    return tuple(parse_literal(t) for t in texts)


@dataclass(frozen=True)
class ActionSchema:
    concept: str
    params: tuple[tuple[str, str], ...]  # (name, sort) — actor is implicit ?self
    pre: tuple[Literal, ...] = ()
    add: tuple[Literal, ...] = ()
    remove: tuple[Literal, ...] = ()
    emits: tuple[tuple[str, tuple[str, ...]], ...] = ()  # (event concept, arg terms)


@dataclass(frozen=True)
class EventSchema:
    concept: str
    params: tuple[tuple[str, str], ...]
    add: tuple[Literal, ...] = ()
    remove: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class Rule:
    id: str
    scope: str  # action or event concept
    pre: tuple[Literal, ...]


@dataclass(frozen=True)
class Process:
    id: str
    period: int
    event_concept: str
    event_args: tuple[str, ...] = ()
    guard: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class GroundAction:
    actor: str
    concept: str
    args: tuple[str, ...]

    def key(self) -> tuple:
        return (self.concept, self.args)


@dataclass(frozen=True)
class GroundEvent:
    concept: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class ActionResult:
    success: bool
    reason: str
    emitted: tuple[GroundEvent, ...] = ()


def solve(literals: Sequence[Literal], facts: frozenset, binding: Optional[dict] = None):
    """All bindings satisfying a conjunction of literals, deterministically.

    Negated literals are evaluated once their terms are ground; they must
    not introduce new variables.
    """
    binding = dict(binding or {})
    positives = [l for l in literals if not l.negated]
    negatives = [l for l in literals if l.negated]
    ordered_facts = sorted(facts)

    def backtrack(idx: int, bound: dict):
        if idx == len(positives):
            for neg in negatives:
                g = neg.substitute(bound)
                if not g.is_ground():
                    raise ParseError(f"negated literal {neg} not ground after binding")
                if g.fact() in facts:
                    return
            yield dict(bound)
            return
        lit = positives[idx].substitute(bound)
        for fact in ordered_facts:
            if fact[0] != lit.relation or len(fact) - 1 != len(lit.terms):
                continue
            trial = dict(bound)
            ok = True
            for term, value in zip(lit.terms, fact[1:]):
                if term.startswith("?"):
                    if trial.get(term, value) != value:
                        ok = False
                        break
                    trial[term] = value
                elif term != value:
                    ok = False
                    break
            if ok:
                yield from backtrack(idx + 1, trial)

    yield from backtrack(0, binding)


def holds(literals: Sequence[Literal], facts: frozenset, binding: Optional[dict] = None) -> bool:
    return next(solve(literals, facts, binding), None) is not None


class World:
    """Mutable world state plus the immutable scenario schemas."""

    def __init__(self, entities: dict[str, str], facts: Iterable[Fact],
                 actions: Sequence[ActionSchema] = (), events: Sequence[EventSchema] = (),
                 rules: Sequence[Rule] = (), processes: Sequence[Process] = ()):
        self.entities = dict(entities)  # id -> sort
        self.facts: set[Fact] = set(facts)
        self.actions = {a.concept: a for a in actions}
        self.events = {e.concept: e for e in events}
        self.rules = tuple(rules)
        self.processes = tuple(sorted(processes, key=lambda p: p.id))

    # --- queries ---

    def snapshot(self) -> frozenset:
        return frozenset(self.facts)

    def state_hash(self) -> str:
        payload = json.dumps(sorted(self.facts), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def entities_of_sort(self, sort: str) -> list[str]:
        return sorted(e for e, s in self.entities.items() if s == sort)

    def _groundings(self, schema: ActionSchema, actor: str):
        """Deterministic enumeration of parameter bindings whose
        preconditions hold."""
        base = {"?self": actor}
        facts = self.snapshot()
        param_vars = [f"?{name}" for name, _ in schema.params]
        seen = set()
        for bound in solve(schema.pre, facts, base):
            free = [v for v in param_vars if v not in bound]
            pools = [
                self.entities_of_sort(dict(schema.params)[v[1:]])
                for v in free
            ]
            for combo in itertools.product(*pools):
                full = dict(bound)
                full.update(zip(free, combo))
                args = tuple(full[v] for v in param_vars)
                if args in seen:
                    continue
                if not holds(schema.pre, facts, {**base, **dict(zip(param_vars, args))}):
                    continue
                seen.add(args)
                yield args

    def applicable_actions(self, actor: str, concepts: Iterable[str]) -> list[GroundAction]:
        """All ground actions from the given repertoire whose preconditions
        hold for this actor, in (concept, args) order. Idle always applies."""
        out = [GroundAction(actor, "Idle", ())]
        for concept in sorted(set(concepts)):
            if concept == "Idle":
                continue
            schema = self.actions.get(concept)
            if schema is None:
                continue
            for args in self._groundings(schema, actor):
                out.append(GroundAction(actor, concept, args))
        out.sort(key=GroundAction.key)
        return out

    def is_applicable(self, action: GroundAction) -> bool:
        if action.concept == "Idle":
            return True
        schema = self.actions.get(action.concept)
        if schema is None or len(action.args) != len(schema.params):
            return False
        binding = self._binding_for(schema, action)
        return holds(schema.pre, self.snapshot(), binding)

    @staticmethod
    def _binding_for(schema, action: GroundAction) -> dict:
        binding = {"?self": action.actor}
        for (name, _), value in zip(schema.params, action.args):
            binding[f"?{name}"] = value
        return binding

    # --- mutation ---

    def _apply_effects(self, add: Sequence[Literal], remove: Sequence[Literal], binding: dict):
        for lit in remove:
            self.facts.discard(lit.substitute(binding).fact())
        for lit in add:
            self.facts.add(lit.substitute(binding).fact())

    def apply_action(self, action: GroundAction) -> ActionResult:
        """Apply effects atomically; on precondition failure the world is
        untouched and a failure result is returned."""
        if action.concept == "Idle":
            return ActionResult(True, "idle")
        schema = self.actions.get(action.concept)
        if schema is None:
            return ActionResult(False, f"unknown action {action.concept}")
        if len(action.args) != len(schema.params):
            return ActionResult(False, f"arity mismatch for {action.concept}")
        binding = self._binding_for(schema, action)
        if not holds(schema.pre, self.snapshot(), binding):
            return ActionResult(False, "precondition failed")
        self._apply_effects(schema.add, schema.remove, binding)
        emitted = []
        for concept, terms in schema.emits:
            event = GroundEvent(concept, tuple(binding.get(t, t) for t in terms))
            self.apply_event(event)
            emitted.append(event)
        return ActionResult(True, "applied", tuple(emitted))

    def check_event(self, event: GroundEvent) -> tuple[bool, str]:
        """Accept iff every rule scoped to the event's concept holds. Pure."""
        schema = self.events.get(event.concept)
        if schema is None:
            raise UnknownEventConceptError(event.concept)
        if len(event.args) != len(schema.params):
            raise SimulationError(f"arity mismatch for event {event.concept}")
        binding = {
            f"?{name}": value for (name, _), value in zip(schema.params, event.args)
        }
        facts = self.snapshot()
        for rule in self.rules:
            if rule.scope != event.concept:
                continue
            if not holds(rule.pre, facts, binding):
                return False, rule.id
        return True, "accepted"

    def apply_event(self, event: GroundEvent) -> None:
        schema = self.events.get(event.concept)
        if schema is None:
            raise UnknownEventConceptError(event.concept)
        binding = {
            f"?{name}": value for (name, _), value in zip(schema.params, event.args)
        }
        self._apply_effects(schema.add, schema.remove, binding)

    def step_processes(self, turn: int) -> list[GroundEvent]:
        """Fire every due process whose guard holds, in process-id order."""
        emitted = []
        for process in self.processes:
            if turn % process.period != 0:
                continue
            if process.guard and not holds(process.guard, self.snapshot()):
                continue
            event = GroundEvent(process.event_concept, process.event_args)
            self.apply_event(event)
            emitted.append(event)
        return emitted


# --- schema construction from plain dicts (scenario file sections) ---

def _params_from(doc) -> tuple[tuple[str, str], ...]:
    return tuple((name, sort) for name, sort in doc)


def action_schema_from_dict(doc: dict) -> ActionSchema:
    try:
        return ActionSchema(
            concept=doc["concept"],
            params=_params_from(doc.get("params", [])),
            pre=parse_literals(doc.get("pre", [])),
            add=parse_literals(doc.get("add", [])),
            remove=parse_literals(doc.get("remove", [])),
            emits=tuple(
                (e["concept"], tuple(e.get("args", []))) for e in doc.get("emits", [])
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad action schema {doc!r}: {exc}") from exc


def event_schema_from_dict(doc: dict) -> EventSchema:
    try:
        return EventSchema(
            concept=doc["concept"],
            params=_params_from(doc.get("params", [])),
            add=parse_literals(doc.get("add", [])),
            remove=parse_literals(doc.get("remove", [])),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad event schema {doc!r}: {exc}") from exc


def rule_from_dict(doc: dict) -> Rule:
    try:
        return Rule(id=doc["id"], scope=doc["scope"], pre=parse_literals(doc.get("pre", [])))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad rule {doc!r}: {exc}") from exc


def process_from_dict(doc: dict) -> Process:
    try:
        period = int(doc["period"])
        if period < 1:
            raise ParseError(f"process {doc.get('id')}: period must be >= 1")
        return Process(
            id=doc["id"],
            period=period,
            event_concept=doc["event"]["concept"],
            event_args=tuple(doc["event"].get("args", [])),
            guard=parse_literals(doc.get("guard", [])),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad process {doc!r}: {exc}") from exc


def fact_from_text(text: str) -> Fact:
    lit = parse_literal(text)
    if lit.negated or not lit.is_ground():
        raise ParseError(f"initial fact must be ground and positive: {text!r}")
    return lit.fact()
