"""Compile rules into continuous basis functions and build the design matrix.

A rule's basis value on a record is min over antecedent memberships times
the Middle-of-Maxima representative of the consequent term. Column 0 of
the design matrix is the intercept (all ones).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import ColumnKind, Dataset
from .linguistics import Vocabulary, clamp, membership, mom_peak
from .rulegen import Rule, format_rule


@dataclass(frozen=True)
class BasisFunction:
    rule: Rule
    peak: float  # consequent MoM representative

    def activation(self, record: dict, vocab: Vocabulary) -> float:
        return min(
            membership(vocab, variable, term, record[variable])
            for variable, term in self.rule.antecedents
        )

    def __call__(self, record: dict, vocab: Vocabulary) -> float:
        return self.activation(record, vocab) * self.peak


@dataclass
class DesignMatrix:
    values: np.ndarray  # n x m, column 0 all ones
    column_rules: list  # [None] + one Rule per basis column
    removed: list[tuple[Rule, str]]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


def compile_rule(rule: Rule, vocab: Vocabulary) -> BasisFunction:
    for variable, term in rule.antecedents + (rule.consequent,):
        vocab.variable(variable).term_index(term)
    return BasisFunction(rule=rule, peak=mom_peak(vocab, *rule.consequent))


def _membership_column(ds: Dataset, vocab: Vocabulary, variable: str, term: str) -> np.ndarray:
    var = vocab.variable(variable)
    mf = var.functions[var.term_index(term)]
    col = ds.column(variable)
    if col.kind is ColumnKind.CONTINUOUS:
        return np.array([mf(clamp(var, float(v))) for v in col.values])
    return np.array([mf(v) for v in col.values])


def build_design_matrix(rules: list[Rule], ds: Dataset, vocab: Vocabulary) -> DesignMatrix:
    values = np.ones((ds.n, 1 + len(rules)))
    cache: dict[tuple[str, str], np.ndarray] = {}
    for j, rule in enumerate(rules, start=1):
        activation = None
        for variable, term in rule.antecedents:
            key = (variable, term)
            if key not in cache:
                cache[key] = _membership_column(ds, vocab, variable, term)
            activation = cache[key] if activation is None else np.minimum(activation, cache[key])
        values[:, j] = activation * mom_peak(vocab, *rule.consequent)
    return DesignMatrix(values=values, column_rules=[None] + list(rules), removed=[])


def dedupe_columns(dm: DesignMatrix, priorities: list[float], tol: float = 1e-9) -> DesignMatrix:
    """Drop basis columns equal (within max-abs-difference tol) to a
    higher-priority column; removals are recorded as secondary meanings."""
    if tol <= 0:
        raise ValueError("tol must be > 0")
    m = dm.m
    order = sorted(range(1, m), key=lambda j: (-priorities[j - 1], j))
    survivors: list[int] = []
    surv_block: np.ndarray | None = None
    removed = list(dm.removed)
    duplicate_of: dict[int, int] = {}
    for j in order:
        col = dm.values[:, j]
        if surv_block is not None:
            diffs = np.max(np.abs(surv_block - col[:, None]), axis=0)
            hit = int(np.argmin(diffs))
            if diffs[hit] <= tol:
                duplicate_of[j] = survivors[hit]
                continue
        survivors.append(j)
        surv_block = (
            col[:, None] if surv_block is None else np.column_stack([surv_block, col])
        )
    for j, keeper in sorted(duplicate_of.items()):
        removed.append(
            (dm.column_rules[j], "duplicate-of %s" % format_rule(dm.column_rules[keeper]))
        )
    keep = [0] + sorted(survivors)
    return DesignMatrix(
        values=dm.values[:, keep],
        column_rules=[dm.column_rules[j] for j in keep],
        removed=removed,
    )
