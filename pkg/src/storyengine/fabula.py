"""Append-only causal graph of story elements.

Edges are untyped (plain causality, no physical/psychological/motivational
subtypes, no enablement edges). The viewpoint character contributes Actions
only, and nothing is ever recorded as the cause of a VC action.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    ChronologyViolationError,
    DuplicateIdError,
    NonActionConceptError,
    ParseError,
    UnknownCauseError,
    VcCauseViolationError,
    VcKindViolationError,
)
from .ontology import Ontology


class ElementKind(str, enum.Enum):
    ACTION = "Action"
    EVENT = "Event"
    PERCEPTION = "Perception"
    INTERNAL_ELEMENT = "InternalElement"
    GOAL = "Goal"
    OUTCOME = "Outcome"


@dataclass(frozen=True)
class FabulaElement:
    id: str
    kind: ElementKind
    concept: str
    args: tuple[str, ...]
    turn: int
    character: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "character": self.character,
            "concept": self.concept,
            "args": list(self.args),
            "turn": self.turn,
        }


@dataclass(frozen=True)
class CausalEdge:
    src: str
    dst: str

    def to_dict(self) -> dict:
        return {"from": self.src, "to": self.dst}


class Fabula:
    """Single-writer, append-only; views handed out are immutable."""

    def __init__(self, vc: str, ontology: Ontology):
        self.vc = vc
        self.ontology = ontology
        self._elements: list[FabulaElement] = []
        self._by_id: dict[str, FabulaElement] = {}
        self._edges: set[CausalEdge] = set()
        self._counter = 0

    # --- accessors ---

    @property
    def elements(self) -> tuple[FabulaElement, ...]:
        return tuple(self._elements)

    @property
    def edges(self) -> frozenset[CausalEdge]:
        return frozenset(self._edges)

    def __len__(self) -> int:
        return len(self._elements)

    def __contains__(self, element_id: str) -> bool:
        return element_id in self._by_id

    def get(self, element_id: str) -> FabulaElement:
        return self._by_id[element_id]

    def fresh_id(self, prefix: str = "e") -> str:
        self._counter += 1
        return f"{prefix}{self._counter:04d}"

    # --- mutation ---

    def append_element(self, element: FabulaElement, causes: Sequence[str] = ()) -> FabulaElement:
        """Append one element plus one causal edge per declared cause."""
        if element.id in self._by_id:
            raise DuplicateIdError(element.id)
        concept = self.ontology.get(element.concept)
        if len(element.args) != concept.arity:
            raise ParseError(
                f"element {element.id}: concept {element.concept} expects "
                f"{concept.arity} args, got {len(element.args)}"
            )
        if element.character == self.vc:
            if element.kind is not ElementKind.ACTION:
                raise VcKindViolationError(
                    f"{element.kind.value} recorded for viewpoint character {self.vc}"
                )
            if causes:
                raise VcCauseViolationError(
                    "causes of a viewpoint-character action are never represented"
                )
        for cause_id in causes:
            if cause_id not in self._by_id:
                raise UnknownCauseError(cause_id)
            if self._by_id[cause_id].turn > element.turn:
                raise ChronologyViolationError(
                    f"cause {cause_id} (turn {self._by_id[cause_id].turn}) "
                    f"after effect {element.id} (turn {element.turn})"
                )
        # edges always point from an existing element to the new one, so a
        # cycle cannot be introduced by construction
        self._elements.append(element)
        self._by_id[element.id] = element
        for cause_id in causes:
            self._edges.add(CausalEdge(cause_id, element.id))
        return element

    def record_vc_action(self, concept: str, args: Sequence[str], turn: int) -> FabulaElement:
        """Record a viewpoint-character action with no incoming edges."""
        if not self.ontology.is_action(concept):
            raise NonActionConceptError(concept)
        element = FabulaElement(
            id=self.fresh_id(),
            kind=ElementKind.ACTION,
            concept=concept,
            args=tuple(args),
            turn=turn,
            character=self.vc,
        )
        return self.append_element(element, ())

    # --- views ---

    def view(self) -> "FabulaView":
        return FabulaView(self.vc, self.elements, self.edges)

    def recent_window(self, k: int) -> "FabulaView":
        """Sub-fabula induced by the last `k` turns."""
        if k < 1:
            raise ValueError("window must be >= 1")
        if not self._elements:
            return FabulaView(self.vc, (), frozenset())
        cutoff = max(e.turn for e in self._elements) - k + 1
        kept = tuple(e for e in self._elements if e.turn >= cutoff)
        ids = {e.id for e in kept}
        edges = frozenset(e for e in self._edges if e.src in ids and e.dst in ids)
        return FabulaView(self.vc, kept, edges)

    # --- serialization ---

    def to_dict(self) -> dict:
        ordered = sorted(self._elements, key=lambda e: (e.turn, e.id))
        edges = sorted(self._edges, key=lambda e: (e.src, e.dst))
        return {
            "vc": self.vc,
            "elements": [e.to_dict() for e in ordered],
            "edges": [e.to_dict() for e in edges],
        }

    def export_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class FabulaView:
    """Immutable snapshot of (part of) a fabula."""

    vc: str
    elements: tuple[FabulaElement, ...]
    edges: frozenset[CausalEdge]

    def __len__(self) -> int:
        return len(self.elements)

    def has_edge(self, src: str, dst: str) -> bool:
        return CausalEdge(src, dst) in self.edges

    def max_turn(self) -> int:
        return max((e.turn for e in self.elements), default=0)


def import_fabula(doc: dict, ontology: Ontology) -> Fabula:
    """Rebuild a fabula from its exported document."""
    try:
        fabula = Fabula(doc["vc"], ontology)
        elements = [
            FabulaElement(
                id=e["id"],
                kind=ElementKind(e["kind"]),
                concept=e["concept"],
                args=tuple(e["args"]),
                turn=int(e["turn"]),
                character=e.get("character"),
            )
            for e in doc["elements"]
        ]
        causes: dict[str, list[str]] = {e.id: [] for e in elements}
        for edge in doc["edges"]:
            causes[edge["to"]].append(edge["from"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad fabula document: {exc}") from exc
    for element in elements:
        fabula.append_element(element, causes[element.id])
    return fabula


def check_invariants(fabula: Fabula) -> list[str]:
    """Structural audit: DAG, chronology, VC purity. Returns violations."""
    problems = []
    indeg = {e.id: 0 for e in fabula.elements}
    adj: dict[str, list[str]] = {e.id: [] for e in fabula.elements}
    for edge in fabula.edges:
        src, dst = edge.src, edge.dst
        if fabula.get(src).turn > fabula.get(dst).turn:
            problems.append(f"chronology violated on {src}->{dst}")
        indeg[dst] += 1
        adj[src].append(dst)
    # Kahn's algorithm for DAG-ness
    queue = [i for i, d in indeg.items() if d == 0]
    seen = 0
    pending = dict(indeg)
    while queue:
        node = queue.pop()
        seen += 1
        for nxt in adj[node]:
            pending[nxt] -= 1
            if pending[nxt] == 0:
                queue.append(nxt)
    if seen != len(fabula.elements):
        problems.append("cycle detected")
    for element in fabula.elements:
        if element.character == fabula.vc:
            if element.kind is not ElementKind.ACTION:
                problems.append(f"VC element {element.id} has kind {element.kind.value}")
            if indeg[element.id] != 0:
                problems.append(f"VC action {element.id} has incoming edges")
    return problems
