"""Trace rules to influential records and flag inconsistent rule pairs.

The per-record contribution ratio of a rule is its absolute weighted
basis value over the sum of all absolute weighted contributions for that
record (intercept included by default).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .rulegen import Rule, format_rule


@dataclass(frozen=True)
class TraceEntry:
    record_index: int
    rho: float
    record: dict


@dataclass(frozen=True)
class Inconsistency:
    kind: str  # conflicting | specializing
    rule_a: str  # conflicting: lexicographic; specializing: the general rule
    rule_b: str
    detail: str


def rho_matrix(dm_values: np.ndarray, beta: np.ndarray,
               include_intercept: bool = True) -> tuple[np.ndarray, list[int]]:
    """Relative contribution of each column to each record's prediction.

    Returns (rho, degenerate_rows); degenerate rows have a zero
    denominator and all-zero rho.
    """
    contributions = np.abs(np.asarray(dm_values, dtype=float) * np.asarray(beta, dtype=float))
    if not include_intercept:
        contributions = contributions.copy()
        contributions[:, 0] = 0.0
    denom = contributions.sum(axis=1)
    degenerate = np.where(denom == 0.0)[0]
    safe = np.where(denom == 0.0, 1.0, denom)
    rho = contributions / safe[:, None]
    rho[degenerate, :] = 0.0
    return rho, [int(i) for i in degenerate]


def trace_rule(dm_values: np.ndarray, beta: np.ndarray, column: int, ds: Dataset,
               top_k: int = 10, include_intercept: bool = True) -> list[TraceEntry]:
    """Top-k records by contribution of the given design-matrix column,
    rho descending, ties by ascending record index."""
    rho, _ = rho_matrix(dm_values, beta, include_intercept)
    col = rho[:, column]
    order = sorted(range(len(col)), key=lambda i: (-col[i], i))[: max(top_k, 0)]
    return [TraceEntry(record_index=i, rho=float(col[i]), record=ds.record(i)) for i in order]


def find_inconsistencies(fitted: list[tuple[Rule, float, float]],
                         beta_threshold: float = 0.0, alpha: float = 0.05,
                         require_significant: bool = False) -> list[Inconsistency]:
    """Pairwise conflicting/specializing detection among fitted rules.

    `fitted` holds (rule, beta, p) triples; only rules with |beta| above
    the threshold (and p below alpha when required) are considered.
    """
    considered = [
        (rule, format_rule(rule))
        for rule, beta, p in fitted
        if abs(beta) > beta_threshold and (not require_significant or p < alpha)
    ]
    out = []
    for i in range(len(considered)):
        for j in range(i + 1, len(considered)):
            (rule_a, text_a), (rule_b, text_b) = considered[i], considered[j]
            if rule_a.consequent == rule_b.consequent:
                continue
            set_a, set_b = set(rule_a.antecedents), set(rule_b.antecedents)
            if set_a == set_b:
                first, second = sorted((text_a, text_b))
                out.append(Inconsistency(
                    kind="conflicting", rule_a=first, rule_b=second,
                    detail="identical antecedents lead to different consequents",
                ))
            elif set_a < set_b or set_b < set_a:
                general, specific = (text_a, text_b) if set_a < set_b else (text_b, text_a)
                out.append(Inconsistency(
                    kind="specializing", rule_a=general, rule_b=specific,
                    detail="a more specific rule has a different consequent",
                ))
    out.sort(key=lambda inc: (inc.rule_a, inc.rule_b, inc.kind))
    return out
