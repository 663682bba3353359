"""Sparse model fit and per-rule significance.

The linear model over basis functions is fit by LASSO coordinate descent
(intercept unpenalized), near-zero coefficients are filtered, and the
surviving coefficients are debiased via nodewise-LASSO relaxed inversion
of the empirical Gram matrix for two-sided Gaussian tests.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .dataset import Dataset, infer_kinds, with_target
from .inference import DesignMatrix, build_design_matrix, dedupe_columns
from .linguistics import Vocabulary, build_vocabulary
from .rulegen import (
    DEFAULT_PRIORITY_WEIGHTS,
    Rule,
    RuleScores,
    format_rule,
    generate_rules,
    parse_rule_lines,
    score_rules,
)


class FittingError(RuntimeError):
    pass


@dataclass(frozen=True)
class LassoConfig:
    lam: float = 0.1
    max_iter: int = 1000
    tol: float = 1e-7
    near_zero: float = 1e-8
    standardize: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.tol <= 0 or self.near_zero <= 0:
            raise ValueError("tol and near_zero must be > 0")


def _soft_threshold(x: float, t: float) -> float:
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


def _cd_lasso(X: np.ndarray, y: np.ndarray, lam: float, max_iter: int, tol: float,
              penalized: np.ndarray, objective_history: list | None = None) -> np.ndarray:
    """Cyclic coordinate descent on (1/(2n))||y - Xb||^2 + lam*sum|b_j|
    over the penalized coordinates. Zero-norm columns keep coefficient 0."""
    n, p = X.shape
    col_ms = (X * X).sum(axis=0) / n  # mean squared column norms
    beta = np.zeros(p)
    r = y.astype(float).copy()
    for _ in range(max_iter):
        max_delta = 0.0
        for j in range(p):
            if col_ms[j] == 0.0:
                continue
            old = beta[j]
            rho = X[:, j] @ r / n + col_ms[j] * old
            if penalized[j]:
                new = _soft_threshold(rho, lam) / col_ms[j]
            else:
                new = rho / col_ms[j]
            if new != old:
                r -= (new - old) * X[:, j]
                beta[j] = new
            max_delta = max(max_delta, abs(new - old))
        if objective_history is not None:
            objective_history.append(
                float((r @ r) / (2 * n) + lam * np.abs(beta[penalized]).sum())
            )
        if max_delta < tol:
            break
    return beta


def lasso_fit(dm: DesignMatrix | np.ndarray, y, config: LassoConfig,
              objective_history: list | None = None) -> np.ndarray:
    """Fit beta (length m, intercept first) on the design matrix."""
    M = dm.values if isinstance(dm, DesignMatrix) else np.asarray(dm, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(M)) or not np.all(np.isfinite(y)):
        raise FittingError("non-finite values in design matrix or response")
    n, m = M.shape
    if n < 2:
        raise FittingError("need at least 2 records to fit")

    if not config.standardize:
        penalized = np.ones(m, dtype=bool)
        penalized[0] = False
        return _cd_lasso(M, y, config.lam, config.max_iter, config.tol,
                         penalized, objective_history)

    X = M[:, 1:]
    mu = X.mean(axis=0)
    scale = X.std(axis=0)
    usable = scale > 0
    safe_scale = np.where(usable, scale, 1.0)
    Z = (X - mu) / safe_scale
    y_mean = y.mean()
    b = _cd_lasso(Z, y - y_mean, config.lam, config.max_iter, config.tol,
                  np.ones(m - 1, dtype=bool), objective_history)
    beta = np.zeros(m)
    beta[1:] = np.where(usable, b / safe_scale, 0.0)
    beta[0] = y_mean - float(beta[1:] @ mu)
    return beta


def near_zero_filter(beta: np.ndarray, rules: list[Rule], near_zero: float):
    """Drop rule j iff |beta_j| < near_zero (strict); intercept always kept.

    Returns (surviving rules, surviving beta incl. intercept, removed pairs).
    """
    keep = [0]
    surviving, removed = [], []
    for j, rule in enumerate(rules, start=1):
        if abs(beta[j]) < near_zero:
            removed.append((rule, "near-zero-lasso"))
        else:
            keep.append(j)
            surviving.append(rule)
    return surviving, beta[keep], removed


@dataclass
class SignificanceResult:
    beta_debiased: np.ndarray  # per rule, original scale
    z: np.ndarray
    p: np.ndarray
    significant: np.ndarray
    alpha: float
    alpha_adjusted: float
    correction: str
    sigma: float


def nodewise_penalty(p: int, n: int, c: float = 0.5) -> float:
    return c * np.sqrt(np.log(max(p, 2)) / n)


def debias_and_test(dm_values: np.ndarray, y, beta_lasso: np.ndarray,
                    alpha: float = 0.05, correction: str = "bonferroni",
                    nodewise_c: float = 0.5, max_iter: int = 1000,
                    tol: float = 1e-8) -> SignificanceResult:
    """Desparsified-LASSO test of every rule column (column 0 = intercept).

    Works in centered/scaled coordinates; the relaxed inverse of the
    empirical Gram matrix comes from one nodewise LASSO regression per
    column. z-scores are scale-invariant, so p-values are unaffected by
    the internal standardization.
    """
    M = np.asarray(dm_values, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = M.shape
    p = m - 1
    if p < 1:
        raise FittingError("need at least one rule column to test")
    X = M[:, 1:]
    mu = X.mean(axis=0)
    scale = X.std(axis=0)
    for j in np.where(scale == 0)[0]:
        raise FittingError("zero-variance basis column %d cannot be tested" % (j + 1))
    Z = (X - mu) / scale

    residual = y - M @ beta_lasso
    beta_s = beta_lasso[1:] * scale

    gram = Z.T @ Z / n
    lam_node = nodewise_penalty(p, n, nodewise_c)
    theta = np.zeros((p, p))
    penalized = np.ones(p - 1, dtype=bool) if p > 1 else np.zeros(0, dtype=bool)
    for j in range(p):
        others = [kk for kk in range(p) if kk != j]
        if others:
            gamma = _cd_lasso(Z[:, others], Z[:, j], lam_node, max_iter, tol, penalized)
            tau2 = float(Z[:, j] @ (Z[:, j] - Z[:, others] @ gamma)) / n
        else:
            gamma = np.zeros(0)
            tau2 = float(Z[:, j] @ Z[:, j]) / n
        tau2 = max(tau2, 1e-12)
        theta[j, j] = 1.0 / tau2
        for idx, kk in enumerate(others):
            theta[j, kk] = -gamma[idx] / tau2

    b_s = beta_s + theta @ (Z.T @ residual) / n
    omega = np.einsum("ij,jk,ik->i", theta, gram, theta)
    omega = np.maximum(omega, 1e-12)

    nnz = int(np.count_nonzero(beta_lasso))
    dof = max(n - nnz, 1)
    sigma = float(np.sqrt(residual @ residual / dof))
    if sigma == 0.0:
        sigma = 1e-300  # perfect fit: any nonzero debiased coefficient is significant

    z = np.sqrt(n) * b_s / (sigma * np.sqrt(omega))
    pvals = 2.0 * norm.sf(np.abs(z))
    alpha_adjusted = alpha / p if correction == "bonferroni" else alpha
    return SignificanceResult(
        beta_debiased=b_s / scale,
        z=z,
        p=pvals,
        significant=pvals < alpha_adjusted,
        alpha=alpha,
        alpha_adjusted=alpha_adjusted,
        correction=correction,
        sigma=sigma,
    )


def metrics(dm_values: np.ndarray, beta: np.ndarray, y) -> dict:
    y = np.asarray(y, dtype=float)
    pred = np.asarray(dm_values, dtype=float) @ beta
    resid = pred - y
    n = len(y)
    rmse = float(np.sqrt(resid @ resid / n))
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else (1.0 if rmse == 0 else 0.0)
    if np.any(y == 0):
        mape = None
    else:
        mape = float(100.0 / n * np.abs(resid / y).sum())
    return {"MAPE": mape, "RMSE": rmse, "R2": r2}


@dataclass(frozen=True)
class PipelineConfig:
    target: str
    k_continuous: int = 3
    k_target: int = 3
    max_antecedents: int = 2
    lam: float = 0.1
    max_iter: int = 1000
    tol: float = 1e-7
    alpha: float = 0.05
    correction: str = "bonferroni"
    priority_weights: tuple = DEFAULT_PRIORITY_WEIGHTS
    priority_threshold: float = 0.0
    dedupe_tol: float = 1e-9
    near_zero: float = 1e-8
    whitelist: tuple[str, ...] = ()
    blacklist: tuple[str, ...] = ()
    hide_insignificant: bool = False
    standardize: bool = True

    def __post_init__(self):
        if not self.target:
            raise ValueError("target column is required")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if not 3 <= self.k_continuous <= 7 or not 3 <= self.k_target <= 7:
            raise ValueError("term counts must be in [3, 7]")
        if self.correction not in ("none", "bonferroni"):
            raise ValueError("correction must be 'none' or 'bonferroni'")
        if self.alpha <= 0 or self.alpha >= 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.dedupe_tol <= 0 or self.near_zero <= 0 or self.tol <= 0:
            raise ValueError("thresholds must be > 0")

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "k_continuous": self.k_continuous,
            "k_target": self.k_target,
            "max_antecedents": self.max_antecedents,
            "lambda": self.lam,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "alpha": self.alpha,
            "correction": self.correction,
            "priority_weights": list(self.priority_weights),
            "priority_threshold": self.priority_threshold,
            "dedupe_tol": self.dedupe_tol,
            "near_zero": self.near_zero,
            "whitelist": list(self.whitelist),
            "blacklist": list(self.blacklist),
            "hide_insignificant": self.hide_insignificant,
            "standardize": self.standardize,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "PipelineConfig":
        kwargs = dict(payload)
        if "lambda" in kwargs:
            kwargs["lam"] = kwargs.pop("lambda")
        if "priority_weights" in kwargs:
            kwargs["priority_weights"] = tuple(kwargs["priority_weights"])
        for key in ("whitelist", "blacklist"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass
class RuleResult:
    rule: Rule
    text: str
    status: str  # significant | not-significant | removed
    support: float
    leverage: float
    priority: float
    provenance: str
    consequent_index: int
    beta: float | None = None
    beta_debiased: float | None = None
    z: float | None = None
    p: float | None = None
    removal_reason: str | None = None


@dataclass
class FitReport:
    config: PipelineConfig
    vocabulary: Vocabulary
    n: int
    intercept: float
    rules: list[RuleResult]
    metrics: dict
    warnings: list[str]
    sigma: float | None = None
    alpha_adjusted: float | None = None
    degenerate_rho_rows: list[int] = field(default_factory=list)

    @property
    def surviving(self) -> list[RuleResult]:
        return [r for r in self.rules if r.status != "removed"]

    def surviving_betas(self) -> np.ndarray:
        """Coefficient vector (intercept first) over surviving rules."""
        return np.array([self.intercept] + [r.beta for r in self.surviving])


def _stage(name: str):
    def wrap(exc: Exception) -> FittingError:
        return FittingError("stage %r: %s" % (name, exc))
    return wrap


def fit_pipeline(ds: Dataset, config: PipelineConfig) -> FitReport:
    """Run the full audit pipeline on a dataset (typed or raw)."""
    collected_warnings: list[str] = []

    if any(c.kind is None for c in ds.columns):
        ds = infer_kinds(ds)
    try:
        ds = with_target(ds, config.target)
    except Exception as exc:
        raise _stage("dataset")(exc) from exc

    try:
        vocab = build_vocabulary(ds, config.k_continuous, config.k_target)
    except Exception as exc:
        raise _stage("vocabulary")(exc) from exc

    try:
        whitelist = parse_rule_lines("\n".join(config.whitelist), vocab, provenance="whitelist")
        blacklist = parse_rule_lines("\n".join(config.blacklist), vocab, provenance="auto")
    except Exception as exc:
        raise _stage("rule-lists")(exc) from exc

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rules = generate_rules(vocab, config.max_antecedents,
                                   blacklist=tuple(blacklist), whitelist=tuple(whitelist))
        collected_warnings += [str(w.message) for w in caught]
        scores = score_rules(rules, ds, vocab, config.priority_weights)
    except Exception as exc:
        raise _stage("rule-generation")(exc) from exc

    results: dict = {}

    def record_removed(rule: Rule, reason: str):
        s = score_by_key[rule.key]
        results[rule.key] = RuleResult(
            rule=rule, text=format_rule(rule), status="removed",
            support=s.support, leverage=s.leverage, priority=s.priority,
            provenance=rule.provenance,
            consequent_index=vocab.variable(vocab.target).term_index(rule.consequent[1]),
            removal_reason=reason,
        )
        collected_warnings.append("removed rule %s: %s" % (format_rule(rule), reason))

    score_by_key = {rule.key: s for rule, s in zip(rules, scores)}

    kept_rules, kept_scores = [], []
    for rule, s in zip(rules, scores):
        if s.priority < config.priority_threshold:
            record_removed(rule, "low-priority")
        else:
            kept_rules.append(rule)
            kept_scores.append(s)

    try:
        dm = build_design_matrix(kept_rules, ds, vocab)
        dm = dedupe_columns(dm, [s.priority for s in kept_scores], config.dedupe_tol)
        for rule, reason in dm.removed:
            record_removed(rule, reason)
        # constant basis columns are collinear with the intercept
        keep = [0]
        for j in range(1, dm.m):
            if np.std(dm.values[:, j]) == 0.0:
                record_removed(dm.column_rules[j], "constant-column")
            else:
                keep.append(j)
        dm = DesignMatrix(values=dm.values[:, keep],
                          column_rules=[dm.column_rules[j] for j in keep],
                          removed=dm.removed)
    except Exception as exc:
        raise _stage("design-matrix")(exc) from exc

    y = np.array(ds.column(config.target).values, dtype=float)
    lasso_cfg = LassoConfig(lam=config.lam, max_iter=config.max_iter, tol=config.tol,
                            near_zero=config.near_zero, standardize=config.standardize)
    try:
        beta = lasso_fit(dm, y, lasso_cfg)
    except Exception as exc:
        raise _stage("lasso")(exc) from exc

    surviving_rules, beta_surv, near_zero_removed = near_zero_filter(
        beta, dm.column_rules[1:], config.near_zero)
    for rule, reason in near_zero_removed:
        record_removed(rule, reason)

    surv_idx = [0] + [j for j in range(1, dm.m)
                      if dm.column_rules[j].key in {r.key for r in surviving_rules}]
    M_surv = dm.values[:, surv_idx]

    sig = None
    if surviving_rules:
        try:
            sig = debias_and_test(M_surv, y, beta_surv,
                                  alpha=config.alpha, correction=config.correction)
        except Exception as exc:
            raise _stage("significance")(exc) from exc

    fit_metrics = metrics(M_surv, beta_surv, y)
    if fit_metrics["MAPE"] is None:
        collected_warnings.append("MAPE undefined: response contains zero values")

    for idx, rule in enumerate(surviving_rules):
        s = score_by_key[rule.key]
        results[rule.key] = RuleResult(
            rule=rule, text=format_rule(rule),
            status="significant" if bool(sig.significant[idx]) else "not-significant",
            support=s.support, leverage=s.leverage, priority=s.priority,
            provenance=rule.provenance,
            consequent_index=vocab.variable(vocab.target).term_index(rule.consequent[1]),
            beta=float(beta_surv[idx + 1]),
            beta_debiased=float(sig.beta_debiased[idx]),
            z=float(sig.z[idx]),
            p=float(sig.p[idx]),
        )

    ordered = [results[rule.key] for rule in rules]
    assert len(ordered) == len(rules)  # rule conservation
    return FitReport(
        config=config,
        vocabulary=vocab,
        n=ds.n,
        intercept=float(beta_surv[0]),
        rules=ordered,
        metrics=fit_metrics,
        warnings=collected_warnings,
        sigma=None if sig is None else sig.sigma,
        alpha_adjusted=None if sig is None else sig.alpha_adjusted,
    )
