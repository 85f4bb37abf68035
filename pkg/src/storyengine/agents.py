"""Believable NPC characters: goal-driven action selection, credibility
classification of suggested actions, and value-based goal adoption.

Agents are reactive utility maximizers. Personal values are stable
character identity: goal adoption reads them but never writes them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .simulation import GroundAction, World


def clamp01(x: float) -> float:
    return max(0.0, min(1.0, x))


@dataclass(frozen=True)
class Goal:
    concept: str
    priority: float  # [0, 1]
    tags: tuple[tuple[str, float], ...] = ()  # (value dimension, affinity in [-1, 1])

    def tag_map(self) -> dict[str, float]:
        return dict(self.tags)


@dataclass(frozen=True)
class Reaction:
    """Scripted internal response to someone else's action.

    Fires when an action with concept `on` occurs and, if `self_arg` is
    set, the reacting agent fills that argument position. Emits an
    InternalElement; arg templates may use "actor", "self", or "arg:N".
    """

    on: str
    concept: str
    args: tuple[str, ...] = ()
    self_arg: Optional[int] = None

    def triggered_by(self, agent_id: str, action: GroundAction) -> bool:
        if action.concept != self.on or action.actor == agent_id:
            return False
        if self.self_arg is not None:
            return (
                self.self_arg < len(action.args)
                and action.args[self.self_arg] == agent_id
            )
        return True

    def resolve_args(self, agent_id: str, action: GroundAction) -> tuple[str, ...]:
        out = []
        for template in self.args:
            if template == "actor":
                out.append(action.actor)
            elif template == "self":
                out.append(agent_id)
            elif template.startswith("arg:"):
                out.append(action.args[int(template[4:])])
            else:
                out.append(template)
        return tuple(out)


@dataclass
class Agent:
    id: str
    role: str
    goals: list[Goal] = field(default_factory=list)
    values: dict[str, float] = field(default_factory=dict)  # dimension -> weight [0,1]
    repertoire: dict[str, dict[str, float]] = field(default_factory=dict)
    # ^ action concept -> per-goal utility contributions in [-1, 1]
    affinities: dict[str, dict[str, float]] = field(default_factory=dict)
    # ^ action concept -> value dimension -> affinity in [-1, 1]
    reactions: tuple[Reaction, ...] = ()

    def copy(self) -> "Agent":
        return Agent(
            id=self.id,
            role=self.role,
            goals=list(self.goals),
            values=dict(self.values),
            repertoire={c: dict(u) for c, u in self.repertoire.items()},
            affinities={c: dict(a) for c, a in self.affinities.items()},
            reactions=self.reactions,
        )

    # --- scoring ---

    def goal_score(self, concept: str) -> float:
        """Priority-weighted sum of the action's per-goal utilities."""
        utilities = self.repertoire.get(concept, {})
        return sum(g.priority * utilities.get(g.concept, 0.0) for g in self.goals)

    def normalized_goal_utility(self, concept: str) -> float:
        """Priority-weighted mean utility, in [-1, 1]; 0 with no goals."""
        total = sum(g.priority for g in self.goals)
        if total == 0:
            return 0.0
        return self.goal_score(concept) / total

    def values_bonus(self, concept: str) -> float:
        affinity = self.affinities.get(concept, {})
        return sum(w * affinity.get(dim, 0.0) for dim, w in self.values.items())


def propose_action(agent: Agent, world: World) -> GroundAction:
    """The applicable action maximizing the goal score; ties break on
    (concept, args). Idle is always applicable."""
    candidates = world.applicable_actions(agent.id, agent.repertoire)
    return min(candidates, key=lambda a: (-agent.goal_score(a.concept), a.concept, a.args))


def credibility(agent: Agent, concept: str, world: World) -> float:
    """Believability of performing `concept`, in [0, 1].

    Out-of-repertoire actions are never believable (0). Blends goal
    consistency with value affinity.
    """
    if concept == "Idle":
        return 0.5
    if concept not in agent.repertoire:
        return 0.0
    score = 0.5 + 0.5 * agent.normalized_goal_utility(concept) + agent.values_bonus(concept)
    return clamp01(score)


@dataclass(frozen=True)
class GoalDecision:
    accepted: bool
    alignment: float


def consider_goal(agent: Agent, concept: str, tags: dict[str, float],
                  priority: float, threshold: float = 0.4) -> GoalDecision:
    """Adopt a suggested goal iff its value alignment clears the threshold.

    On acceptance the goal joins the agent's goal set; rejection leaves the
    agent untouched.
    """
    alignment = sum(w * tags.get(dim, 0.0) for dim, w in agent.values.items())
    accepted = alignment >= threshold
    if accepted:
        agent.goals.append(Goal(concept, priority, tuple(sorted(tags.items()))))
    return GoalDecision(accepted, alignment)


def react(agent: Agent, action: GroundAction) -> list[tuple[str, tuple[str, ...]]]:
    """Internal elements (concept, args) this agent emits in response to an
    observed action."""
    out = []
    for reaction in agent.reactions:
        if reaction.triggered_by(agent.id, action):
            out.append((reaction.concept, reaction.resolve_args(agent.id, action)))
    return out
