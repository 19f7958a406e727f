"""Ground truth by brute force, plus F1 scoring.

Deliberately shares nothing with the streaming engine's matching or joins:
patterns are matched by a local function and joined with a nested loop.
"""
from __future__ import annotations

from typing import Iterable

from ..query import PredicatePath, Query, SolutionMapping, Variable


def _bind(term, value, binding: dict) -> bool:
    if isinstance(term, Variable):
        if term in binding:
            return binding[term] == value
        binding[term] = value
        return True
    if isinstance(term, PredicatePath):
        return value in term.alternatives
    return term == value


def oracle_evaluate(query: Query, data) -> set[SolutionMapping]:
    """All projected solutions of ``query`` over a triple set or environment."""
    triples = list(getattr(data, "union_graph", data))
    partial: list[dict] = [{}]
    for tp in query.bgp:
        extended = []
        for binding in partial:
            for triple in triples:
                candidate = dict(binding)
                if all(_bind(term, value, candidate) for term, value in zip(tp, triple)):
                    extended.append(candidate)
        partial = extended
        if not partial:
            break
    names = query.projection
    return {SolutionMapping({v: b[v] for v in names if v in b}) for b in partial}


def accuracy_f1(expected: Iterable, actual: Iterable) -> float:
    """F1 of ``actual`` against ``expected`` as a percentage."""
    expected, actual = set(expected), set(actual)
    hits = len(expected & actual)
    precision = hits / len(actual) if actual else (1.0 if not expected else 0.0)
    recall = hits / len(expected) if expected else 1.0
    if precision + recall == 0:
        return 0.0
    return 200 * precision * recall / (precision + recall)
