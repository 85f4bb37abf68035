"""Concept taxonomy with generalization transformations and their inverses.

Concepts form a single-parent tree. Generalization walks toward the root
(clamped there); the inverse transformation is picking a concrete
descendant again.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import (
    ArityMismatchError,
    CycleInTaxonomyError,
    DanglingParentError,
    ParseError,
    UnknownConceptError,
)

CONCEPT_KINDS = ("action", "state", "entity")

# Concepts every scenario gets for free: the idle fallback action and the
# two outcome markers produced by the simulation.
BUILTIN_CONCEPTS = (
    {"id": "Idle", "parent": None, "kind": "action", "arity": 0},
    {"id": "Success", "parent": None, "kind": "state", "arity": 0},
    {"id": "Failure", "parent": None, "kind": "state", "arity": 0},
)


@dataclass(frozen=True)
class Concept:
    id: str
    parent: Optional[str]
    kind: str
    arity: int


class Ontology:
    """Immutable after construction; freely shareable."""

    def __init__(self, concepts: Iterable[Concept], include_builtins: bool = True):
        self._concepts: dict[str, Concept] = {}
        for c in concepts:
            if c.id in self._concepts:
                raise ParseError(f"duplicate concept id {c.id!r}")
            self._concepts[c.id] = c
        if include_builtins:
            for spec in BUILTIN_CONCEPTS:
                if spec["id"] not in self._concepts:
                    self._concepts[spec["id"]] = Concept(**spec)
        self._validate()
        self._depth = {cid: self._compute_depth(cid) for cid in self._concepts}

    def _validate(self):
        for c in self._concepts.values():
            if c.kind not in CONCEPT_KINDS:
                raise ParseError(f"concept {c.id!r} has unknown kind {c.kind!r}")
            if c.arity < 0:
                raise ParseError(f"concept {c.id!r} has negative arity")
            if c.parent is not None:
                parent = self._concepts.get(c.parent)
                if parent is None:
                    raise DanglingParentError(f"{c.id} -> {c.parent}")
                if parent.arity != c.arity:
                    raise ArityMismatchError(
                        f"{c.id} (arity {c.arity}) under {c.parent} (arity {parent.arity})"
                    )
        # cycle check via parent-chain walk with a visited set
        for cid in self._concepts:
            seen = set()
            cur = cid
            while cur is not None:
                if cur in seen:
                    raise CycleInTaxonomyError(f"cycle through {cur!r}")
                seen.add(cur)
                cur = self._concepts[cur].parent

    def _compute_depth(self, cid: str) -> int:
        d = 0
        cur = self._concepts[cid].parent
        while cur is not None:
            d += 1
            cur = self._concepts[cur].parent
        return d

    # --- queries ---

    def __contains__(self, cid: str) -> bool:
        return cid in self._concepts

    def get(self, cid: str) -> Concept:
        try:
            return self._concepts[cid]
        except KeyError:
            raise UnknownConceptError(cid) from None

    @property
    def concept_ids(self) -> list[str]:
        return sorted(self._concepts)

    @property
    def roots(self) -> list[str]:
        return sorted(c.id for c in self._concepts.values() if c.parent is None)

    def depth(self, cid: str) -> int:
        self.get(cid)
        return self._depth[cid]

    def generalize(self, cid: str, steps: int) -> str:
        """Ancestor `steps` levels up, clamped at the root."""
        cur = self.get(cid)
        for _ in range(steps):
            if cur.parent is None:
                break
            cur = self._concepts[cur.parent]
        return cur.id

    def steps_to_ancestor(self, cid: str, ancestor: str) -> Optional[int]:
        """Number of parent links from `cid` up to `ancestor`, or None."""
        self.get(ancestor)
        cur = self.get(cid)
        steps = 0
        while True:
            if cur.id == ancestor:
                return steps
            if cur.parent is None:
                return None
            cur = self._concepts[cur.parent]
            steps += 1

    def is_descendant(self, a: str, b: str) -> bool:
        """True iff `b` is reachable from `a` via zero or more parent links."""
        return self.steps_to_ancestor(a, b) is not None

    def descendants(self, cid: str) -> list[str]:
        """All concepts below (and including) `cid`, sorted by id."""
        self.get(cid)
        return sorted(c for c in self._concepts if self.is_descendant(c, cid))

    def is_action(self, cid: str) -> bool:
        return self.get(cid).kind == "action"


def ontology_from_dict(doc: dict) -> Ontology:
    if not isinstance(doc, dict) or "concepts" not in doc:
        raise ParseError("ontology document must be an object with a 'concepts' list")
    concepts = []
    for entry in doc["concepts"]:
        try:
            concepts.append(
                Concept(
                    id=entry["id"],
                    parent=entry.get("parent"),
                    kind=entry["kind"],
                    arity=int(entry["arity"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad concept entry {entry!r}: {exc}") from exc
    return Ontology(concepts)


def load_ontology(path) -> Ontology:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return ontology_from_dict(doc)
