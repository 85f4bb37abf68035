"""Independent brute-force oracle for context matching.

Enumerates every injective mapping of instantiated pattern elements onto
fabula elements and checks the constraints directly, with no shared code
path with the engine's backtracking matcher.
"""

import itertools

from storyengine.cases import is_variable


def ancestor_steps(ontology, concept, ancestor):
    steps = 0
    current = concept
    while True:
        if current == ancestor:
            return steps
        parent = ontology.get(current).parent
        if parent is None:
            return None
        current = parent
        steps += 1


def brute_force_matches(case, view, ontology, budget, entity_sorts=None):
    """Set of (var items, element items, cost) for every valid mapping."""
    pattern = sorted((el for el in case.context if el.instantiated), key=lambda e: e.id)
    if not pattern:
        return set()
    pattern_ids = {el.id for el in pattern}
    edges = [
        (e.src, e.dst)
        for e in case.context_edges
        if e.src in pattern_ids and e.dst in pattern_ids
    ]
    fabula_edges = {(e.src, e.dst) for e in view.edges}
    results = set()
    for combo in itertools.permutations(view.elements, len(pattern)):
        mapping = dict(zip((p.id for p in pattern), combo))
        binding = {}
        cost = 0
        ok = True
        for pel in pattern:
            fel = mapping[pel.id]
            if fel.kind is not pel.kind:
                ok = False
                break
            steps = ancestor_steps(ontology, fel.concept, pel.concept)
            if steps is None or steps > budget:
                ok = False
                break
            cost += steps
            pairs = list(zip(pel.args, fel.args))
            if (pel.character is None) != (fel.character is None):
                ok = False
                break
            if pel.character is not None:
                pairs.append((pel.character, fel.character))
            if len(pel.args) != len(fel.args):
                ok = False
                break
            for pterm, fterm in pairs:
                if is_variable(pterm):
                    if binding.setdefault(pterm, fterm) != fterm:
                        ok = False
                        break
                    sort = case.variable_sort(pterm)
                    if (
                        entity_sorts
                        and sort is not None
                        and entity_sorts.get(fterm) is not None
                        and entity_sorts[fterm] != sort
                    ):
                        ok = False
                        break
                elif pterm != fterm:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        if any(
            (mapping[a].id, mapping[b].id) not in fabula_edges for a, b in edges
        ):
            continue
        results.add(
            (
                tuple(sorted(binding.items())),
                tuple(sorted((pid, fel.id) for pid, fel in mapping.items())),
                cost,
            )
        )
    return results


def as_key_set(matches):
    """Project engine matches onto the oracle's comparison key."""
    return {
        (m.binding.variables, m.binding.elements, m.generalization_cost)
        for m in matches
    }
