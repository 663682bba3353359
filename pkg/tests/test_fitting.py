import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rulelens.fitting import (
    FittingError,
    LassoConfig,
    PipelineConfig,
    debias_and_test,
    fit_pipeline,
    lasso_fit,
    metrics,
    near_zero_filter,
    nodewise_penalty,
)
from rulelens.rulegen import Rule
from rulelens.synthgen import SplitMix64

from tests.conftest import make_dataset


def _random_design(n, p, seed=0, intercept=True):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    if intercept:
        X = np.column_stack([np.ones(n), X])
    return X


def test_lasso_zero_penalty_matches_least_squares():
    M = _random_design(200, 5, seed=1)
    rng = np.random.default_rng(2)
    beta_true = np.array([3.0, 1.0, -2.0, 0.5, 0.0, 4.0])
    y = M @ beta_true + 0.01 * rng.normal(size=200)
    expected, *_ = np.linalg.lstsq(M, y, rcond=None)
    got = lasso_fit(M, y, LassoConfig(lam=0.0, max_iter=5000, tol=1e-12))
    np.testing.assert_allclose(got, expected, atol=1e-8)


def test_lasso_huge_penalty_collapses_to_intercept():
    M = _random_design(100, 4, seed=3)
    y = np.random.default_rng(4).normal(size=100) + 7.0
    got = lasso_fit(M, y, LassoConfig(lam=1e12))
    np.testing.assert_allclose(got[1:], 0.0)
    assert got[0] == pytest.approx(y.mean())


def test_lasso_orthogonal_design_soft_threshold():
    # columns with X'X = n*I and zero mean: coordinate descent converges in
    # one sweep to soft-thresholding of the per-column OLS coefficients
    n = 8
    H = np.array([[1 if bin(i & j).count("1") % 2 == 0 else -1
                   for j in range(n)] for i in range(n)], dtype=float)
    X = H[:, 1:4]  # orthogonal, zero-mean, squared norm n per column
    M = np.column_stack([np.ones(n), X])
    y = np.array([2.0, -1.0, 0.5, 3.0, -2.0, 0.0, 1.0, -0.5])
    lam = 0.4
    got = lasso_fit(M, y, LassoConfig(lam=lam, standardize=False))
    ols = X.T @ y / n
    expected = np.sign(ols) * np.maximum(np.abs(ols) - lam, 0.0)
    np.testing.assert_allclose(got[1:], expected, atol=1e-10)
    assert got[0] == pytest.approx(y.mean())


def test_lasso_objective_nonincreasing():
    M = _random_design(60, 8, seed=5)
    y = np.random.default_rng(6).normal(size=60)
    history = []
    lasso_fit(M, y, LassoConfig(lam=0.05), objective_history=history)
    assert len(history) >= 1
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))


def test_lasso_standardization_invariance():
    # rescaling a predictor column must not change fitted predictions
    M = _random_design(120, 3, seed=7)
    y = np.random.default_rng(8).normal(size=120) + M[:, 1] * 2.0
    beta_a = lasso_fit(M, y, LassoConfig(lam=0.1))
    M_scaled = M.copy()
    M_scaled[:, 1] *= 1000.0
    beta_b = lasso_fit(M_scaled, y, LassoConfig(lam=0.1))
    np.testing.assert_allclose(M @ beta_a, M_scaled @ beta_b, atol=1e-6)


def test_lasso_constant_rule_column_gets_zero():
    M = _random_design(50, 2, seed=9)
    M[:, 2] = 4.2  # constant, collinear with the intercept
    y = M[:, 1] * 3.0 + 1.0
    beta = lasso_fit(M, y, LassoConfig(lam=0.01))
    assert beta[2] == 0.0


def test_lasso_rejects_bad_inputs():
    M = _random_design(10, 2)
    y = np.zeros(10)
    with pytest.raises(FittingError):
        lasso_fit(np.array([[1.0, np.nan]]), np.array([1.0]), LassoConfig())
    with pytest.raises(FittingError):
        lasso_fit(M[:1], y[:1], LassoConfig())
    with pytest.raises(ValueError):
        LassoConfig(lam=-1.0)


def test_near_zero_filter_strict_boundary():
    rules = [Rule(antecedents=(("x", "low"),), consequent=("Y", t))
             for t in ("low", "medium", "high")]
    beta = np.array([5.0, 1e-8, 0.5e-8, -2.0])
    surviving, beta_out, removed = near_zero_filter(beta, rules, near_zero=1e-8)
    assert surviving == [rules[0], rules[2]]  # exactly 1e-8 survives (strict <)
    np.testing.assert_array_equal(beta_out, [5.0, 1e-8, -2.0])
    assert removed == [(rules[1], "near-zero-lasso")]


def test_nodewise_penalty_formula():
    assert nodewise_penalty(10, 100) == pytest.approx(0.5 * np.sqrt(np.log(10) / 100))
    assert nodewise_penalty(1, 100) == pytest.approx(0.5 * np.sqrt(np.log(2) / 100))


def test_debias_recovers_signal_and_rejects_noise():
    n, p = 400, 6
    M = _random_design(n, p, seed=11)
    rng = np.random.default_rng(12)
    beta_true = np.array([1.0, 4.0, 0.0, 0.0, -3.0, 0.0, 0.0])
    y = M @ beta_true + rng.normal(size=n)
    beta = lasso_fit(M, y, LassoConfig(lam=0.05))
    sig = debias_and_test(M, y, beta, alpha=0.05, correction="bonferroni")
    assert sig.alpha_adjusted == pytest.approx(0.05 / p)
    # strong coefficients are detected with the right sign
    assert sig.p[0] < 1e-10 and sig.z[0] > 0
    assert sig.p[3] < 1e-10 and sig.z[3] < 0
    assert sig.beta_debiased[0] == pytest.approx(4.0, abs=0.3)
    assert sig.beta_debiased[3] == pytest.approx(-3.0, abs=0.3)
    # pure-noise coefficients are not declared significant
    for j in (1, 2, 4, 5):
        assert not sig.significant[j]


def test_debias_calibrated_under_the_null():
    # Monte Carlo size of the per-coordinate test on independent designs
    rejections = 0
    trials = 200
    n, p = 120, 4
    for t in range(trials):
        rng = np.random.default_rng(1000 + t)
        M = np.column_stack([np.ones(n), rng.normal(size=(n, p))])
        y = rng.normal(size=n)
        beta = lasso_fit(M, y, LassoConfig(lam=0.05))
        sig = debias_and_test(M, y, beta, alpha=0.05, correction="none")
        rejections += int(np.any(sig.p < 0.05 / p))  # familywise, Bonferroni level
    rate = rejections / trials
    assert 0.005 <= rate <= 0.12


def test_debias_zero_variance_column_raises():
    M = _random_design(50, 2, seed=13)
    M[:, 2] = 1.5
    y = M[:, 1]
    with pytest.raises(FittingError, match="zero-variance"):
        debias_and_test(M, y, np.array([0.0, 1.0, 0.0]))


def test_debias_correction_none_uses_raw_alpha():
    M = _random_design(100, 3, seed=14)
    y = M[:, 1] + np.random.default_rng(15).normal(size=100)
    beta = lasso_fit(M, y, LassoConfig(lam=0.05))
    sig = debias_and_test(M, y, beta, alpha=0.05, correction="none")
    assert sig.alpha_adjusted == 0.05


def test_metrics_hand_computed():
    M = np.array([[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]])
    beta = np.array([0.0, 1.0])
    y = np.array([2.0, 2.0, 2.0])
    out = metrics(M, beta, y)
    # residuals (-1, 0, 1); constant response means SS_tot = 0, so R2
    # falls back to the deterministic imperfect-fit value
    assert out["RMSE"] == pytest.approx(np.sqrt(2 / 3))
    assert out["R2"] == 0.0
    assert out["MAPE"] == pytest.approx(100.0 / 3 * (0.5 + 0.0 + 0.5))


def test_metrics_perfect_fit_and_zero_response():
    M = np.array([[1.0, 2.0], [1.0, 4.0]])
    beta = np.array([0.0, 1.0])
    out = metrics(M, beta, np.array([2.0, 4.0]))
    assert out["RMSE"] == 0.0 and out["R2"] == 1.0 and out["MAPE"] == 0.0
    out = metrics(M, beta, np.array([0.0, 4.0]))
    assert out["MAPE"] is None


def test_pipeline_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(target="")
    with pytest.raises(ValueError):
        PipelineConfig(target="Y", lam=-0.1)
    with pytest.raises(ValueError):
        PipelineConfig(target="Y", k_continuous=2)
    with pytest.raises(ValueError):
        PipelineConfig(target="Y", correction="holm")
    with pytest.raises(ValueError):
        PipelineConfig(target="Y", alpha=1.0)
    with pytest.raises(ValueError):
        PipelineConfig(target="Y", near_zero=0.0)


def test_pipeline_config_json_round_trip():
    config = PipelineConfig(target="Salary", lam=0.25, whitelist=("IF x IS low THEN Y IS low",),
                            correction="none", k_target=5)
    payload = config.to_json()
    assert payload["lambda"] == 0.25  # serialized under the public key name
    assert "lam" not in payload
    assert PipelineConfig.from_json(payload) == config


def _identity_dataset(n=300, seed=21):
    rng = SplitMix64(seed)
    xs = [10.0 * rng.uniform() for _ in range(n)]
    noise = [x for x in xs]
    return make_dataset([("x", xs), ("Y", [10.0 * v for v in noise])], target="Y")


def test_fit_pipeline_recovers_monotone_relation():
    ds = _identity_dataset()
    report = fit_pipeline(ds, PipelineConfig(target="Y", lam=0.1))
    assert report.n == 300
    assert report.metrics["R2"] > 0.9
    # rule conservation: every generated rule is accounted for exactly once
    assert len(report.rules) == 9
    statuses = {r.status for r in report.rules}
    assert statuses <= {"significant", "not-significant", "removed"}
    surviving = report.surviving
    assert surviving
    assert all(r.beta is not None and r.p is not None for r in surviving)
    # both ends of the x partition carry surviving rules; the consequent
    # term is arbitrary because its columns are collinear after scaling
    antecedent_terms = {r.rule.antecedents[0][1] for r in surviving}
    assert {"low", "high"} <= antecedent_terms


def test_fit_pipeline_priority_threshold_removes_rules():
    ds = _identity_dataset(n=120)
    report = fit_pipeline(ds, PipelineConfig(target="Y", priority_threshold=1e9))
    assert all(r.status == "removed" and r.removal_reason == "low-priority"
               for r in report.rules)
    assert report.surviving == []


def test_fit_pipeline_blacklist_and_whitelist():
    ds = _identity_dataset(n=120)
    banned = "IF x IS low THEN Y IS low"
    report = fit_pipeline(ds, PipelineConfig(target="Y", blacklist=(banned,)))
    assert all(r.text != banned for r in report.rules)
    assert len(report.rules) == 8
    favored = "IF x IS low THEN Y IS high"
    report = fit_pipeline(ds, PipelineConfig(target="Y", whitelist=(favored,)))
    entry = next(r for r in report.rules if r.text == favored)
    assert entry.provenance == "whitelist"
    # whitelist weight lifts priority above the identical auto-generated rule
    auto = [r for r in report.rules if r.provenance == "auto"]
    assert entry.priority > max(r.priority for r in auto if r.text != favored) - 1e12


def test_fit_pipeline_unknown_target_fails_cleanly():
    ds = _identity_dataset(n=120)
    with pytest.raises(FittingError, match="dataset"):
        fit_pipeline(ds, PipelineConfig(target="Nope"))


def test_fit_pipeline_constant_predictor_column():
    n = 150
    rng = SplitMix64(33)
    xs = [10.0 * rng.uniform() for _ in range(n)]
    ds = make_dataset([("x", xs), ("c", [1.0] * n), ("Y", [3.0 * v for v in xs])], target="Y")
    # a zero-range predictor cannot form a partition; the failure is staged
    with pytest.raises(FittingError, match="vocabulary"):
        fit_pipeline(ds, PipelineConfig(target="Y"))
