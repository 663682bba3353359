"""Fuzzy if-then rules: text grammar, generation, and interestingness.

Grammar (keywords case-insensitive)::

    rule   := "IF" clause ("AND" clause)* "THEN" clause
    clause := ident "IS" term
    ident  := bare token or double-quoted string, naming a column
    term   := vocabulary label; internal spaces written as underscores
              (very_low), or the whole term double-quoted

The THEN-clause must be on the target column. Antecedents are conjunctive
only, one term per distinct non-target variable.
"""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass, field

from .dataset import Dataset
from .linguistics import Vocabulary, discretize


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__("%s (at position %d)" % (message, position))
        self.position = position


@dataclass(frozen=True)
class Rule:
    antecedents: tuple[tuple[str, str], ...]  # (variable, term)
    consequent: tuple[str, str]
    provenance: str = field(default="auto", compare=False)
    whitelist_weight: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not self.antecedents:
            raise ValueError("rule needs at least one antecedent")
        variables = [v for v, _ in self.antecedents]
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate antecedent variable in %r" % (variables,))
        if self.consequent[0] in variables:
            raise ValueError("consequent variable also appears in antecedents")

    @property
    def key(self):
        """Identity: antecedent set plus consequent, order-insensitive."""
        return (frozenset(self.antecedents), self.consequent)


@dataclass(frozen=True)
class RuleScores:
    support: float
    leverage: float
    antecedent_count: int
    priority: float


DEFAULT_PRIORITY_WEIGHTS = (1.0, 1.0, 0.1, 10.0)  # support, leverage, antecedents, whitelist


_TOKEN = re.compile(r'"((?:[^"]|"")*)"|(\S+)')


def _tokenize(text: str):
    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group(1) is not None:
            tokens.append((m.group(1).replace('""', '"'), True, m.start()))
        else:
            tokens.append((m.group(2), False, m.start()))
    return tokens


def _resolve_column(name: str, vocab: Vocabulary, pos: int) -> str:
    if name in vocab.variables:
        return name
    matches = [c for c in vocab.variables if c.lower() == name.lower()]
    if len(matches) == 1:
        return matches[0]
    raise RuleSyntaxError("unknown column %r" % name, pos)


def _resolve_term(column: str, raw: str, quoted: bool, vocab: Vocabulary, pos: int) -> str:
    candidate = raw if quoted else raw.replace("_", " ")
    labels = vocab.variable(column).labels
    if candidate in labels:
        return candidate
    matches = [t for t in labels if t.lower() == candidate.lower()]
    if len(matches) == 1:
        return matches[0]
    raise RuleSyntaxError(
        "unknown term %r for column %r (have %s)" % (candidate, column, ", ".join(labels)), pos
    )


def parse_rule(text: str, vocab: Vocabulary, provenance: str = "auto",
               whitelist_weight: float = 0.0) -> Rule:
    tokens = _tokenize(text)
    cursor = 0

    def peek():
        return tokens[cursor] if cursor < len(tokens) else (None, False, len(text))

    def expect_keyword(kw: str):
        nonlocal cursor
        tok, quoted, pos = peek()
        if tok is None or quoted or tok.upper() != kw:
            raise RuleSyntaxError("expected %r, got %r" % (kw, tok), pos)
        cursor += 1

    def parse_clause():
        nonlocal cursor
        tok, quoted, pos = peek()
        if tok is None:
            raise RuleSyntaxError("expected column name", pos)
        cursor += 1
        column = _resolve_column(tok, vocab, pos)
        expect_keyword("IS")
        tok, quoted, pos = peek()
        if tok is None:
            raise RuleSyntaxError("expected term after IS", pos)
        cursor += 1
        term = _resolve_term(column, tok, quoted, vocab, pos)
        return column, term

    expect_keyword("IF")
    clauses = [parse_clause()]
    while True:
        tok, quoted, pos = peek()
        if tok is not None and not quoted and tok.upper() == "AND":
            cursor += 1
            clauses.append(parse_clause())
        else:
            break
    expect_keyword("THEN")
    consequent = parse_clause()
    tok, _, pos = peek()
    if tok is not None:
        raise RuleSyntaxError("unexpected trailing input %r" % tok, pos)

    if consequent[0] != vocab.target:
        raise RuleSyntaxError(
            "consequent must be on the target column %r, got %r" % (vocab.target, consequent[0]), 0
        )
    seen = set()
    for variable, _ in clauses:
        if variable in seen:
            raise RuleSyntaxError("duplicate antecedent variable %r" % variable, 0)
        if variable == vocab.target:
            raise RuleSyntaxError("target column %r cannot be an antecedent" % variable, 0)
        seen.add(variable)
    return Rule(
        antecedents=tuple(clauses),
        consequent=consequent,
        provenance=provenance,
        whitelist_weight=whitelist_weight,
    )


def _format_ident(name: str) -> str:
    if re.search(r"\s", name) or '"' in name:
        return '"%s"' % name.replace('"', '""')
    return name


def _format_term(term: str) -> str:
    if "_" in term or '"' in term:
        return '"%s"' % term.replace('"', '""')
    return term.replace(" ", "_")


def format_rule(rule: Rule) -> str:
    parts = ["IF"]
    for i, (variable, term) in enumerate(rule.antecedents):
        if i:
            parts.append("AND")
        parts += [_format_ident(variable), "IS", _format_term(term)]
    variable, term = rule.consequent
    parts += ["THEN", _format_ident(variable), "IS", _format_term(term)]
    return " ".join(parts)


def generate_rules(vocab: Vocabulary, max_antecedents: int = 2,
                   blacklist: tuple[Rule, ...] = (),
                   whitelist: tuple[Rule, ...] = ()) -> list[Rule]:
    """Enumerate all candidate rules up to max_antecedents, minus the
    blacklist, plus whitelist rules (which get whitelist provenance)."""
    if max_antecedents < 1:
        raise ValueError("max_antecedents must be >= 1")
    predictors = [name for name in vocab.variables if name != vocab.target]
    if max_antecedents > len(predictors):
        warnings.warn(
            "max_antecedents %d exceeds variable count %d; capped"
            % (max_antecedents, len(predictors)),
            stacklevel=2,
        )
        max_antecedents = len(predictors)
    target_terms = vocab.variable(vocab.target).labels
    blacklist_keys = {r.key for r in blacklist}
    whitelist_by_key = {r.key: r for r in whitelist}

    rules: list[Rule] = []
    seen = set()
    for size in range(1, max_antecedents + 1):
        for combo in itertools.combinations(predictors, size):
            term_sets = [vocab.variable(v).labels for v in combo]
            for terms in itertools.product(*term_sets):
                for target_term in target_terms:
                    antecedents = tuple(zip(combo, terms))
                    candidate = Rule(antecedents=antecedents, consequent=(vocab.target, target_term))
                    if candidate.key in blacklist_keys or candidate.key in seen:
                        continue
                    seen.add(candidate.key)
                    if candidate.key in whitelist_by_key:
                        wl = whitelist_by_key[candidate.key]
                        candidate = Rule(
                            antecedents=antecedents,
                            consequent=candidate.consequent,
                            provenance="whitelist",
                            whitelist_weight=wl.whitelist_weight or 1.0,
                        )
                    rules.append(candidate)
    for wl in whitelist:
        if wl.key in blacklist_keys or wl.key in seen:
            continue
        seen.add(wl.key)
        rules.append(
            Rule(
                antecedents=wl.antecedents,
                consequent=wl.consequent,
                provenance="whitelist",
                whitelist_weight=wl.whitelist_weight or 1.0,
            )
        )
    return rules


def discretize_dataset(ds: Dataset, vocab: Vocabulary) -> dict[str, tuple[str, ...]]:
    """Ephemeral argmax discretization of every cell, used only for
    support/leverage scoring."""
    return {
        col.name: tuple(discretize(vocab, col.name, v) for v in col.values)
        for col in ds.columns
    }


def _holds(frame: dict[str, tuple[str, ...]], clauses, i: int) -> bool:
    return all(frame[variable][i] == term for variable, term in clauses)


def _validate_rule(rule: Rule, vocab: Vocabulary) -> None:
    for variable, term in rule.antecedents + (rule.consequent,):
        vocab.variable(variable).term_index(term)


def support(rule: Rule, ds: Dataset, vocab: Vocabulary,
            frame: dict[str, tuple[str, ...]] | None = None) -> float:
    _validate_rule(rule, vocab)
    frame = frame if frame is not None else discretize_dataset(ds, vocab)
    clauses = rule.antecedents + (rule.consequent,)
    hits = sum(1 for i in range(ds.n) if _holds(frame, clauses, i))
    return hits / ds.n


def leverage(rule: Rule, ds: Dataset, vocab: Vocabulary,
             frame: dict[str, tuple[str, ...]] | None = None) -> float:
    _validate_rule(rule, vocab)
    frame = frame if frame is not None else discretize_dataset(ds, vocab)
    both = ante = cons = 0
    for i in range(ds.n):
        a = _holds(frame, rule.antecedents, i)
        c = _holds(frame, (rule.consequent,), i)
        both += a and c
        ante += a
        cons += c
    n = ds.n
    return both / n - (ante / n) * (cons / n)


def priority(scores: RuleScores, weights=DEFAULT_PRIORITY_WEIGHTS,
             whitelist_weight: float = 0.0) -> float:
    w_support, w_leverage, w_antecedents, w_whitelist = weights
    return (
        w_support * scores.support
        + w_leverage * scores.leverage
        + w_antecedents * scores.antecedent_count
        + w_whitelist * whitelist_weight
    )


def score_rules(rules: list[Rule], ds: Dataset, vocab: Vocabulary,
                weights=DEFAULT_PRIORITY_WEIGHTS) -> list[RuleScores]:
    frame = discretize_dataset(ds, vocab)
    scored = []
    for rule in rules:
        s = support(rule, ds, vocab, frame)
        lev = leverage(rule, ds, vocab, frame)
        base = RuleScores(support=s, leverage=lev,
                          antecedent_count=len(rule.antecedents), priority=0.0)
        scored.append(
            RuleScores(
                support=s,
                leverage=lev,
                antecedent_count=len(rule.antecedents),
                priority=priority(base, weights, rule.whitelist_weight),
            )
        )
    return scored


def parse_rule_lines(text: str, vocab: Vocabulary, provenance: str = "auto") -> list[Rule]:
    """One rule per line; blank lines and `#` comments ignored."""
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rules.append(
                parse_rule(
                    stripped, vocab, provenance=provenance,
                    whitelist_weight=1.0 if provenance == "whitelist" else 0.0,
                )
            )
        except (RuleSyntaxError, ValueError) as exc:
            raise RuleSyntaxError("line %d: %s" % (lineno, exc), 0) from exc
    return rules
