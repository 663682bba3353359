"""End-to-end acceptance suite.

Each test is one acceptance criterion; run with -v to get one pass/fail
line per criterion. The housing-data criterion needs the classic housing
CSV at data/boston_housing.csv (or $RULELENS_BOSTON_CSV) and fails with a
clear message when the file is absent.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient
from scipy import stats

from rulelens.cli import main as cli_main
from rulelens.dataset import infer_kinds, load_csv, serialize_csv
from rulelens.fitting import LassoConfig, PipelineConfig, debias_and_test, fit_pipeline, lasso_fit
from rulelens.service import create_app
from rulelens.synthgen import gen_biased_salaries, gen_sanity, gen_skewed_salaries


def _elapsed_under(t0, bound, label):
    took = time.monotonic() - t0
    assert took < bound, "%s took %.1fs (budget %.0fs)" % (label, took, bound)


def test_criterion_sanity_rediscovery():
    t0 = time.monotonic()
    ds = gen_sanity(1000, seed=42)
    report = fit_pipeline(ds, PipelineConfig(target="y"))
    significant = [r for r in report.rules if r.status == "significant"]

    generative = [r for r in significant
                  if r.rule.antecedents == (("data", r.rule.consequent[1]),)]
    assert generative, "no significant rule maps the data column onto the matching target term"

    random_cols = {"rand1", "rand2", "rand3"}
    random_significant = [
        r for r in significant
        if any(v in random_cols for v, _ in r.rule.antecedents)
    ]
    assert not random_significant, [r.text for r in random_significant]

    surviving_random = [
        abs(r.beta) for r in report.surviving
        if any(v in random_cols for v, _ in r.rule.antecedents)
    ]
    max_random = max(surviving_random, default=0.0)
    for r in generative:
        assert abs(r.beta) >= 10.0 * max_random, (r.text, r.beta, max_random)
    _elapsed_under(t0, 60.0, "sanity rediscovery")


def test_criterion_bias_rediscovery():
    t0 = time.monotonic()
    ds = gen_biased_salaries(2000, seed=1)
    report = fit_pipeline(ds, PipelineConfig(
        target="Salary", lam=0.1, max_iter=1000, k_continuous=3, k_target=3,
        max_antecedents=2))
    hits = [
        r for r in report.rules
        if r.status == "significant"
        and r.rule.consequent == ("Salary", "low")
        and ("Gender", "female") in r.rule.antecedents
    ]
    assert hits, "no significant female -> low-salary rule found"
    _elapsed_under(t0, 300.0, "bias rediscovery")


def test_criterion_skew_hidden_discrepancy():
    t0 = time.monotonic()
    ds = gen_skewed_salaries(10000, seed=7)
    genders = ds.column("Gender").values
    salary = np.array(ds.column("Salary").values)
    male = salary[np.array([g == "male" for g in genders])]
    rest = salary[np.array([g != "male" for g in genders])]

    # the classical two-sample mean test sees nothing
    _, p_t = stats.ttest_ind(male, rest, equal_var=False)
    assert p_t > 0.05, "mean test rejected (p=%g); groups were moment-matched" % p_t
    # ... even though the distributions differ in shape
    assert stats.skew(male) < 0 < stats.skew(rest)

    report = fit_pipeline(ds, PipelineConfig(
        target="Salary", lam=0.1, correction="none", max_antecedents=2))
    gender_hits = [
        r for r in report.rules
        if r.status == "significant"
        and any(v == "Gender" for v, _ in r.rule.antecedents)
    ]
    assert gender_hits, "fitted model exposed no gender-antecedent rule"
    _elapsed_under(t0, 600.0, "skew discrepancy")


def _load_housing():
    path = os.environ.get("RULELENS_BOSTON_CSV",
                          str(Path(__file__).resolve().parents[1] / "data" / "boston_housing.csv"))
    if not Path(path).is_file():
        pytest.fail(
            "housing CSV not available at %s; this environment has no network "
            "access and no package mirror copy of the classic housing data, so "
            "the criterion cannot be executed here. Provide the 506-record CSV "
            "(CRIM..LSTAT,MEDV) via RULELENS_BOSTON_CSV to run it." % path)
    return infer_kinds(load_csv(Path(path).read_bytes()))


def test_criterion_housing_fit_quality():
    ds = _load_housing()
    report = fit_pipeline(ds, PipelineConfig(target="MEDV"))
    assert report.metrics["MAPE"] is not None and report.metrics["MAPE"] <= 8.0

    alt = fit_pipeline(ds, PipelineConfig(
        target="MEDV", max_antecedents=1, k_continuous=5, k_target=5, lam=0.1))
    assert alt.metrics["MAPE"] is not None and alt.metrics["MAPE"] <= 15.0
    directional = [
        r for r in alt.rules
        if r.status == "significant"
        and ("RM", "very high") in r.rule.antecedents
        and r.rule.consequent == ("MEDV", "high")
    ]
    assert directional, "no significant RM very-high -> MEDV high rule"


def test_criterion_lasso_oracles():
    rng = np.random.default_rng(100)
    # (a) zero penalty equals the normal-equations solution
    M = np.column_stack([np.ones(150), rng.normal(size=(150, 6))])
    y = M @ rng.normal(size=7) + 0.1 * rng.normal(size=150)
    exact = np.linalg.solve(M.T @ M, M.T @ y)
    got = lasso_fit(M, y, LassoConfig(lam=0.0, max_iter=20000, tol=1e-14))
    assert np.max(np.abs(got - exact)) / np.max(np.abs(exact)) < 1e-6

    # (b) orthonormal-design soft-thresholding identity
    n = 16
    H = np.array([[1 if bin(i & j).count("1") % 2 == 0 else -1
                   for j in range(n)] for i in range(n)], dtype=float)
    X = H[:, 1:6]
    M = np.column_stack([np.ones(n), X])
    y = rng.normal(size=n) * 3.0
    lam = 0.3
    beta = lasso_fit(M, y, LassoConfig(lam=lam, standardize=False))
    ols = X.T @ y / n
    expected = np.sign(ols) * np.maximum(np.abs(ols) - lam, 0.0)
    assert np.max(np.abs(beta[1:] - expected)) < 1e-8

    # (c) objective monotone non-increasing per sweep
    M = np.column_stack([np.ones(80), rng.normal(size=(80, 10))])
    y = rng.normal(size=80)
    history = []
    lasso_fit(M, y, LassoConfig(lam=0.05), objective_history=history)
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))

    # (d) sparsity is non-increasing along an increasing lambda grid
    nnz = []
    for lam in (0.0, 0.01, 0.05, 0.2, 1.0, 5.0):
        beta = lasso_fit(M, y, LassoConfig(lam=lam))
        nnz.append(int(np.sum(np.abs(beta[1:]) > 1e-10)))
    assert all(b <= a for a, b in zip(nnz, nnz[1:])), nnz


def test_criterion_debias_calibration():
    t0 = time.monotonic()
    n, p = 120, 4
    pvals = []
    for rep in range(500):
        rng = np.random.default_rng(20_000 + rep)
        M = np.column_stack([np.ones(n), rng.normal(size=(n, p))])
        y = rng.normal(size=n)
        beta = lasso_fit(M, y, LassoConfig(lam=0.05))
        sig = debias_and_test(M, y, beta, alpha=0.05, correction="none")
        pvals.extend(sig.p.tolist())
    rate = float(np.mean(np.array(pvals) < 0.05))
    assert 0.02 <= rate <= 0.09, "null rejection rate %.4f" % rate

    # strong-signal construction is detected overwhelmingly
    rng = np.random.default_rng(999)
    M = np.column_stack([np.ones(n), rng.normal(size=(n, p))])
    y = 5.0 * M[:, 1] + rng.normal(size=n)
    beta = lasso_fit(M, y, LassoConfig(lam=0.05))
    sig = debias_and_test(M, y, beta)
    assert sig.p[0] < 1e-6
    _elapsed_under(t0, 600.0, "debias calibration")


def test_criterion_rho_trace_properties():
    from rulelens.audit import rho_matrix, trace_rule
    from tests.conftest import make_dataset

    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(3, 40))
        m = int(rng.integers(2, 9))
        values = np.column_stack([np.ones(n), rng.normal(size=(n, m - 1))])
        beta = rng.normal(size=m)
        rho, degenerate = rho_matrix(values, beta)
        for i in range(n):
            if i in degenerate:
                assert rho[i].sum() == 0.0
            else:
                assert abs(rho[i].sum() - 1.0) < 1e-12

        # brute-force recomputation of the contribution ratios per record
        ds = make_dataset([("x", list(map(float, range(n)))),
                           ("Y", [0.0] * n)], target="Y")
        col = int(rng.integers(1, m))
        expected = []
        for i in range(n):
            contributions = [abs(beta[j] * values[i, j]) for j in range(m)]
            denom = sum(contributions)
            expected.append(contributions[col] / denom if denom else 0.0)
        order = sorted(range(n), key=lambda i: (-expected[i], i))
        entries = trace_rule(values, beta, col, ds, top_k=n)
        assert [e.record_index for e in entries] == order
        for e in entries:
            assert abs(e.rho - expected[e.record_index]) < 1e-12


def test_criterion_consistency_checker():
    from rulelens.audit import find_inconsistencies
    from rulelens.rulegen import Rule

    def rule(ants, cons):
        return Rule(antecedents=tuple(ants), consequent=cons)

    # crafted fixture: one conflicting pair on the same antecedent, plus a
    # specialization that flips the consequent
    conflicted = [
        (rule([("NOX", "medium")], ("MEDV", "low")), 9.29, 1.1e-12),
        (rule([("NOX", "medium")], ("MEDV", "very high")), 1.50, 5.3e-6),
        (rule([("NOX", "medium"), ("RM", "high")], ("MEDV", "high")), 0.7, 0.01),
        (rule([("LSTAT", "high")], ("MEDV", "low")), 2.91, 0.0277),
    ]
    found = find_inconsistencies(conflicted)
    kinds = sorted(f.kind for f in found)
    assert "conflicting" in kinds and "specializing" in kinds

    consistent = [
        (rule([("NOX", "medium")], ("MEDV", "low")), 9.29, 1.1e-12),
        (rule([("LSTAT", "high")], ("MEDV", "low")), 2.91, 0.0277),
        (rule([("RM", "very high")], ("MEDV", "high")), 9.07, 1.8e-15),
    ]
    assert find_inconsistencies(consistent) == []

    # raising the beta threshold can only shrink the finding set
    counts = [len(find_inconsistencies(conflicted, beta_threshold=t))
              for t in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)]
    assert all(b <= a for a, b in zip(counts, counts[1:])), counts


def test_criterion_determinism(tmp_path):
    csv_bytes = serialize_csv(gen_sanity(200, seed=5)).encode()
    csv_path = tmp_path / "d.csv"
    csv_path.write_bytes(csv_bytes)

    runner = CliRunner()
    outputs = []
    for name in ("r1.json", "r2.json"):
        out = tmp_path / name
        result = runner.invoke(cli_main, [
            "fit", "--input", str(csv_path), "--target", "y",
            "--report", str(out)])
        assert result.exit_code == 0, result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1], "two CLI runs disagree"

    with TestClient(create_app(data_dir=str(tmp_path / "data"))) as client:
        dataset_id = client.post("/api/datasets", content=csv_bytes).json()["dataset_id"]
        job_id = client.post("/api/jobs", json={
            "dataset_id": dataset_id, "config": {"target": "y"}}).json()["job_id"]
        deadline = time.time() + 60
        while time.time() < deadline:
            record = client.get(f"/api/jobs/{job_id}").json()
            if record["state"] in ("done", "failed"):
                break
            time.sleep(0.05)
        assert record["state"] == "done", record.get("error")
        http_bytes = client.get(f"/api/jobs/{job_id}/report.json").content
    assert http_bytes == outputs[0], "HTTP report differs from CLI report"
