"""Turn-based emergent-narrative engine: causal fabula graph, ontology-
generalized case retrieval, and drama management by negotiation with
believable agents and a rule-checked world simulation."""

from .fabula import CausalEdge, ElementKind, Fabula, FabulaElement, FabulaView
from .ontology import Concept, Ontology, load_ontology
from .cases import Case, CaseLibrary, Suggestion, SuggestionKind, validate_case
from .retrieval import Match, RetrievalConfig, Retrieved, match_pattern, retrieve
from .drama import DramaManager, NegotiationOutcome, ThresholdConfig
from .agents import Agent, Goal, consider_goal, credibility, propose_action
from .simulation import GroundAction, GroundEvent, World
from .scenario import StoryElements, load_story_elements, validate_scenario
from .session import Session, ScriptedPolicy, run_session, storify

__version__ = "0.1.0"
