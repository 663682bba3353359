"""Report JSON (schema_version 1) and rebuilding fit context for traces.

The JSON rendering is deterministic (sorted keys, fixed separators) so
identical (dataset, config) inputs produce byte-identical reports on
every path that emits them.
"""

from __future__ import annotations

import json

import numpy as np

from .dataset import Dataset, infer_kinds, with_target
from .fitting import FitReport, PipelineConfig
from .inference import build_design_matrix
from .linguistics import build_vocabulary, vocabulary_json
from .rulegen import parse_rule

SCHEMA_VERSION = 1


def report_to_json(report: FitReport) -> dict:
    rules = []
    for r in report.rules:
        entry = {
            "text": r.text,
            "status": r.status,
            "support": r.support,
            "leverage": r.leverage,
            "priority": r.priority,
            "provenance": r.provenance,
            "consequent_index": r.consequent_index,
            "beta": r.beta,
            "beta_debiased": r.beta_debiased,
            "z": r.z,
            "p": r.p,
        }
        if r.removal_reason is not None:
            entry["removal_reason"] = r.removal_reason
        rules.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "config": report.config.to_json(),
        "vocabulary": vocabulary_json(report.vocabulary),
        "n": report.n,
        "intercept": report.intercept,
        "rules": rules,
        "metrics": report.metrics,
        "warnings": report.warnings,
        "sigma": report.sigma,
        "alpha_adjusted": report.alpha_adjusted,
    }


def render_report_json(report: FitReport | dict) -> str:
    payload = report if isinstance(report, dict) else report_to_json(report)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


class ReportContext:
    """Design matrix and coefficients of the surviving rules, rebuilt
    from a report dict plus the original dataset."""

    def __init__(self, report: dict, ds: Dataset):
        self.config = PipelineConfig.from_json(report["config"])
        if any(c.kind is None for c in ds.columns):
            ds = infer_kinds(ds)
        self.dataset = with_target(ds, self.config.target)
        self.vocabulary = build_vocabulary(
            self.dataset, self.config.k_continuous, self.config.k_target)
        self.entries = [r for r in report["rules"] if r["status"] != "removed"]
        self.rules = [parse_rule(r["text"], self.vocabulary) for r in self.entries]
        dm = build_design_matrix(self.rules, self.dataset, self.vocabulary)
        self.values = dm.values
        self.beta = np.array([report["intercept"]] + [r["beta"] for r in self.entries])

    def column_of(self, rule_text: str) -> int | None:
        """1-based design-matrix column of a rule by its canonical text."""
        for idx, entry in enumerate(self.entries):
            if entry["text"] == rule_text:
                return idx + 1
        return None

    def fitted_triples(self):
        return [
            (rule, entry["beta"], entry["p"] if entry["p"] is not None else 1.0)
            for rule, entry in zip(self.rules, self.entries)
        ]
