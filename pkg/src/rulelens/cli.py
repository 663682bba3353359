"""Command-line interface: fit, trace, check, gen, serve.

Exit codes: 0 success, 1 internal error, 2 validation error, 3 (check
only) inconsistencies found.
"""

from __future__ import annotations

import difflib
import json
import sys

import click

from . import audit, synthgen
from .dataset import DatasetError, load_csv, serialize_csv
from .fitting import FitReport, FittingError, PipelineConfig, fit_pipeline
from .report import ReportContext, render_report_json
from .rulegen import RuleSyntaxError

EXIT_VALIDATION = 2
EXIT_INCONSISTENT = 3


@click.group()
def main():
    """Audit labeled tabular data with fuzzy if-then rules."""


def _fail(message: str, code: int = EXIT_VALIDATION):
    click.echo("error: %s" % message, err=True)
    sys.exit(code)


def _load_dataset(path: str):
    try:
        with open(path, "rb") as fh:
            return load_csv(fh.read())
    except FileNotFoundError:
        _fail("input file not found: %s" % path)
    except DatasetError as exc:
        _fail(str(exc))


def _read_rule_lines(path: str | None) -> tuple[str, ...]:
    if not path:
        return ()
    with open(path, "r", encoding="utf-8") as fh:
        return tuple(
            line.strip() for line in fh
            if line.strip() and not line.strip().startswith("#")
        )


def print_rule_table(report: FitReport, out=None):
    out = out or click.get_text_stream("stdout")
    header = f"{'rule':<70} {'beta':>12} {'support':>8} {'leverage':>9} {'p':>10} {'status':>16}"
    out.write(header + "\n" + "-" * len(header) + "\n")
    for r in report.rules:
        if r.status == "removed":
            continue
        if report.config.hide_insignificant and r.status != "significant":
            continue
        beta = "%.6g" % r.beta if r.beta is not None else "-"
        p = "%.4g" % r.p if r.p is not None else "-"
        out.write(f"{r.text:<70} {beta:>12} {r.support:>8.4f} {r.leverage:>9.5f} "
                  f"{p:>10} {r.status:>16}\n")
    out.write("\nmetrics: %s\n" % json.dumps(report.metrics, sort_keys=True))


@main.command("fit")
@click.option("--input", "input_path", required=True, help="CSV file to audit")
@click.option("--target", required=True, help="response column name")
@click.option("--lambda", "lam", type=float, default=0.1, show_default=True)
@click.option("--max-iter", type=int, default=1000, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--correction", type=click.Choice(["none", "bonferroni"]), default="bonferroni")
@click.option("--k-continuous", type=int, default=3, show_default=True)
@click.option("--k-target", type=int, default=3, show_default=True)
@click.option("--max-antecedents", type=int, default=2, show_default=True)
@click.option("--priority-threshold", type=float, default=0.0)
@click.option("--dedupe-tol", type=float, default=1e-9)
@click.option("--near-zero", type=float, default=1e-8)
@click.option("--whitelist", "whitelist_path", default=None, help="rule file, one per line")
@click.option("--blacklist", "blacklist_path", default=None, help="rule file, one per line")
@click.option("--hide-insignificant", is_flag=True, default=False)
@click.option("--report", "report_path", default=None, help="write JSON report here")
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json")
def cli_fit(input_path, target, lam, max_iter, alpha, correction, k_continuous, k_target,
            max_antecedents, priority_threshold, dedupe_tol, near_zero,
            whitelist_path, blacklist_path, hide_insignificant, report_path, fmt):
    """Run the full pipeline and emit a report."""
    if lam < 0:
        _fail("lambda must be >= 0")
    ds = _load_dataset(input_path)
    try:
        config = PipelineConfig(
            target=target, k_continuous=k_continuous, k_target=k_target,
            max_antecedents=max_antecedents, lam=lam, max_iter=max_iter,
            alpha=alpha, correction=correction,
            priority_threshold=priority_threshold, dedupe_tol=dedupe_tol,
            near_zero=near_zero,
            whitelist=_read_rule_lines(whitelist_path),
            blacklist=_read_rule_lines(blacklist_path),
            hide_insignificant=hide_insignificant,
        )
    except ValueError as exc:
        _fail(str(exc))
    try:
        report = fit_pipeline(ds, config)
    except (DatasetError, RuleSyntaxError, FittingError, ValueError) as exc:
        _fail(str(exc))
    rendered = render_report_json(report)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(rendered)
    if fmt == "table":
        print_rule_table(report)
    elif not report_path:
        click.echo(rendered, nl=False)


def _load_report(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail("unreadable report %s: %s" % (path, exc))


@main.command("trace")
@click.option("--report", "report_path", required=True)
@click.option("--input", "input_path", required=True, help="the original CSV")
@click.option("--rule", "rule_text", required=True, help="canonical rule text")
@click.option("--top", type=int, default=10, show_default=True)
@click.option("--no-intercept", is_flag=True, default=False,
              help="exclude the intercept from the contribution denominator")
def cli_trace(report_path, input_path, rule_text, top, no_intercept):
    """List the records that drive a fitted rule."""
    payload = _load_report(report_path)
    ds = _load_dataset(input_path)
    try:
        ctx = ReportContext(payload, ds)
    except (DatasetError, ValueError) as exc:
        _fail(str(exc))
    column = ctx.column_of(rule_text)
    if column is None:
        texts = [e["text"] for e in ctx.entries]
        near = difflib.get_close_matches(rule_text, texts, n=3, cutoff=0.3)
        hint = ("; close matches: " + "; ".join(near)) if near else ""
        _fail("rule not found in report: %s%s" % (rule_text, hint))
    entries = audit.trace_rule(ctx.values, ctx.beta, column, ctx.dataset,
                               top_k=top, include_intercept=not no_intercept)
    click.echo(json.dumps(
        [{"record_index": e.record_index, "rho": e.rho, "record": e.record}
         for e in entries],
        sort_keys=True, indent=2))


@main.command("check")
@click.option("--report", "report_path", required=True)
@click.option("--input", "input_path", required=True, help="the original CSV")
@click.option("--beta-threshold", type=float, default=0.0, show_default=True)
@click.option("--only-significant", is_flag=True, default=False)
def cli_check(report_path, input_path, beta_threshold, only_significant):
    """Scan a report for conflicting/specializing rule pairs."""
    payload = _load_report(report_path)
    ds = _load_dataset(input_path)
    try:
        ctx = ReportContext(payload, ds)
    except (DatasetError, ValueError) as exc:
        _fail(str(exc))
    found = audit.find_inconsistencies(
        ctx.fitted_triples(), beta_threshold=beta_threshold,
        alpha=ctx.config.alpha, require_significant=only_significant)
    click.echo(json.dumps(
        [{"kind": f.kind, "rule_a": f.rule_a, "rule_b": f.rule_b, "detail": f.detail}
         for f in found],
        sort_keys=True, indent=2))
    if found:
        sys.exit(EXIT_INCONSISTENT)


@main.command("gen")
@click.argument("kind")
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--out", "out_path", default=None, help="output CSV (stdout if omitted)")
def cli_gen(kind, n, seed, out_path):
    """Generate a validation dataset: sanity | salaries | salaries-skew."""
    if kind not in synthgen.GENERATORS:
        _fail("unknown dataset kind %r (have: %s)" % (kind, ", ".join(synthgen.GENERATORS)))
    try:
        ds = synthgen.GENERATORS[kind](n, seed)
    except ValueError as exc:
        _fail(str(exc))
    text = serialize_csv(ds)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command("serve")
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", default=None, help="overrides RULELENS_DATA_DIR")
def cli_serve(port, host, data_dir):
    """Start the HTTP service (and web UI) on localhost."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir=data_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
