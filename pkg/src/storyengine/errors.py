"""Exception hierarchy for the story engine."""


class StoryEngineError(Exception):
    """Base class for all engine errors."""


class ParseError(StoryEngineError):
    """A document failed to parse against its schema."""


# --- fabula ---

class FabulaError(StoryEngineError):
    pass


class DuplicateIdError(FabulaError):
    pass


class UnknownCauseError(FabulaError):
    pass


class VcKindViolationError(FabulaError):
    """Non-Action element recorded for the viewpoint character."""


class VcCauseViolationError(FabulaError):
    """Causes supplied for a viewpoint-character action."""


class ChronologyViolationError(FabulaError):
    pass


# --- ontology ---

class OntologyError(StoryEngineError):
    pass


class UnknownConceptError(OntologyError):
    pass


class NonActionConceptError(OntologyError):
    pass


class CycleInTaxonomyError(OntologyError):
    pass


class DanglingParentError(OntologyError):
    pass


class ArityMismatchError(OntologyError):
    pass


# --- cases / retrieval ---

class CaseError(StoryEngineError):
    pass


class ValidationFailureError(CaseError):
    def __init__(self, case_id, violations):
        super().__init__(f"case {case_id!r} failed validation: {violations}")
        self.case_id = case_id
        self.violations = violations


class UnboundVariableError(CaseError):
    """A suggestion references a variable the match left unbound."""


# --- simulation / agents ---

class SimulationError(StoryEngineError):
    pass


class UnknownEventConceptError(SimulationError):
    pass


class UnknownCharacterError(StoryEngineError):
    pass


# --- scenario ---

class ScenarioError(StoryEngineError):
    pass


class MissingVcError(ScenarioError):
    pass


class MultipleVcError(ScenarioError):
    pass


class DanglingCaseRefError(ScenarioError):
    pass
