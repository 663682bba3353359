"""Linguistic variables: term vocabularies and membership evaluation.

Continuous columns get a Ruspini (unit-sum) partition of K equidistant
triangular membership functions with shouldered boundary terms; categorical
columns get one indicator term per distinct value. Crisp representatives
come from Middle-of-Maxima.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import ColumnKind, Dataset

# Canonical ordered label chain for continuous partitions.
LABEL_CHAIN = (
    "very low",
    "low",
    "medium low",
    "medium",
    "medium high",
    "high",
    "very high",
)

# Symmetric subsets of the chain by term count.
_LABELS_BY_K = {
    3: ("low", "medium", "high"),
    4: ("very low", "low", "high", "very high"),
    5: ("very low", "low", "medium", "high", "very high"),
    6: ("very low", "low", "medium low", "medium high", "high", "very high"),
    7: LABEL_CHAIN,
}


class VocabularyError(ValueError):
    pass


@dataclass(frozen=True)
class TriangularMF:
    left: float
    peak: float
    right: float
    # shoulders hold membership at 1 beyond the peak towards the range edge
    shoulder_left: bool = False
    shoulder_right: bool = False

    def __call__(self, v: float) -> float:
        if v <= self.peak:
            if self.shoulder_left:
                return 1.0
            if v <= self.left:
                return 0.0
            return (v - self.left) / (self.peak - self.left)
        if self.shoulder_right:
            return 1.0
        if v >= self.right:
            return 0.0
        return (self.right - v) / (self.right - self.peak)


@dataclass(frozen=True)
class CategoricalIndicator:
    value: str

    def __call__(self, v) -> float:
        return 1.0 if str(v) == self.value else 0.0


@dataclass(frozen=True)
class LinguisticVariable:
    variable: str
    kind: ColumnKind
    labels: tuple[str, ...]
    functions: tuple
    minimum: float | None = None
    maximum: float | None = None

    def term_index(self, term: str) -> int:
        try:
            return self.labels.index(term)
        except ValueError:
            raise VocabularyError(
                "unknown term %r for variable %r (have %r)" % (term, self.variable, self.labels)
            ) from None


@dataclass(frozen=True)
class Vocabulary:
    variables: dict[str, LinguisticVariable]
    target: str

    def variable(self, name: str) -> LinguisticVariable:
        if name not in self.variables:
            raise VocabularyError("unknown variable: %r" % name)
        return self.variables[name]


def _continuous_variable(name: str, lo: float, hi: float, k: int) -> LinguisticVariable:
    if not 3 <= k <= 7:
        raise VocabularyError("term count must be in [3, 7], got %d" % k)
    if lo >= hi:
        raise VocabularyError("degenerate range for column %r: min == max == %r" % (name, lo))
    step = (hi - lo) / (k - 1)
    peaks = [lo + i * step for i in range(k)]
    peaks[-1] = hi  # avoid roundoff drift at the top end
    mfs = []
    for i, p in enumerate(peaks):
        mfs.append(
            TriangularMF(
                left=peaks[i - 1] if i > 0 else lo,
                peak=p,
                right=peaks[i + 1] if i < k - 1 else hi,
                shoulder_left=(i == 0),
                shoulder_right=(i == k - 1),
            )
        )
    return LinguisticVariable(
        variable=name,
        kind=ColumnKind.CONTINUOUS,
        labels=_LABELS_BY_K[k],
        functions=tuple(mfs),
        minimum=lo,
        maximum=hi,
    )


def build_vocabulary(ds: Dataset, k_continuous: int = 3, k_target: int = 3) -> Vocabulary:
    """Build per-column vocabularies from a typed dataset with a target."""
    if ds.target is None:
        raise VocabularyError("dataset has no designated target column")
    variables = {}
    for col in ds.columns:
        if col.kind is None:
            raise VocabularyError("column %r is untyped; run infer_kinds first" % col.name)
        if col.kind is ColumnKind.CONTINUOUS:
            k = k_target if col.name == ds.target else k_continuous
            variables[col.name] = _continuous_variable(col.name, col.minimum, col.maximum, k)
        else:
            variables[col.name] = LinguisticVariable(
                variable=col.name,
                kind=ColumnKind.CATEGORICAL,
                labels=col.categories,
                functions=tuple(CategoricalIndicator(v) for v in col.categories),
            )
    return Vocabulary(variables=variables, target=ds.target)


def clamp(var: LinguisticVariable, value: float) -> float:
    if var.minimum is not None and value < var.minimum:
        return var.minimum
    if var.maximum is not None and value > var.maximum:
        return var.maximum
    return value


def membership(vocab: Vocabulary, variable: str, term: str, value) -> float:
    var = vocab.variable(variable)
    idx = var.term_index(term)
    if var.kind is ColumnKind.CONTINUOUS:
        return var.functions[idx](clamp(var, float(value)))
    return var.functions[idx](value)


def memberships(vocab: Vocabulary, variable: str, value) -> list[float]:
    """All term memberships of one value (fuzzification)."""
    var = vocab.variable(variable)
    if var.kind is ColumnKind.CONTINUOUS:
        value = clamp(var, float(value))
    return [f(value) for f in var.functions]


def discretize(vocab: Vocabulary, variable: str, value) -> str:
    """Argmax-membership term; ties go to the lower-ordered term."""
    var = vocab.variable(variable)
    degrees = memberships(vocab, variable, value)
    best = 0
    for i in range(1, len(degrees)):
        if degrees[i] > degrees[best]:
            best = i
    return var.labels[best]


def mom_peak(vocab: Vocabulary, variable: str, term: str) -> float:
    """Middle-of-Maxima crisp representative of a continuous term.

    The midpoint of the membership plateau; with the equidistant
    construction the boundary shoulders collapse to the range endpoint,
    so this is always the peak location.
    """
    var = vocab.variable(variable)
    if var.kind is not ColumnKind.CONTINUOUS:
        raise VocabularyError("no crisp representative for categorical variable %r" % variable)
    mf = var.functions[var.term_index(term)]
    plateau_lo = var.minimum if mf.shoulder_left else mf.peak
    plateau_hi = var.maximum if mf.shoulder_right else mf.peak
    return (plateau_lo + plateau_hi) / 2.0


def vocabulary_json(vocab: Vocabulary) -> dict:
    """Serializable view for reports and the UI membership plots."""
    out = {}
    for name, var in sorted(vocab.variables.items()):
        if var.kind is ColumnKind.CONTINUOUS:
            out[name] = {
                "kind": "continuous",
                "range": [var.minimum, var.maximum],
                "terms": [
                    {"label": lbl, "peak": mf.peak, "left": mf.left, "right": mf.right}
                    for lbl, mf in zip(var.labels, var.functions)
                ],
            }
        else:
            out[name] = {
                "kind": "categorical",
                "terms": [{"label": lbl} for lbl in var.labels],
            }
    return out
