/**
 * DOM wiring for the audit UI: upload panel, config editor, rule table,
 * trace and inconsistency panels. Rendering only, no domain math; the
 * pure logic lives in state.ts and grammar.ts.
 */

import {
  Client,
  type DatasetSummary,
  type Inconsistency,
  type JobRecord,
  type Report,
  type RuleEntry,
  type TraceEntry,
} from "./api.js";
import type { VocabularySpec } from "./grammar.js";
import {
  type ConfigDraft,
  defaultConfig,
  defaultTableState,
  previewPeaks,
  removedRules,
  type SortColumn,
  type TableState,
  toggleLine,
  trendGlyph,
  validateConfig,
  validateRuleLines,
  visibleRules,
} from "./state.js";

interface Session {
  dataset?: DatasetSummary;
  config: ConfigDraft;
  jobId?: string;
  report?: Report;
  table: TableState;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  node.append(...children);
  return node;
}

function fmt(x: number | null | undefined, digits = 4): string {
  if (x === null || x === undefined) return "–";
  if (x !== 0 && (Math.abs(x) < 1e-3 || Math.abs(x) >= 1e6)) return x.toExponential(2);
  return x.toFixed(digits);
}

/** Vocabulary spec for client-side rule validation, from the last report. */
function vocabOf(report: Report): VocabularySpec {
  const variables: Record<string, string[]> = {};
  for (const [name, v] of Object.entries(report.vocabulary.variables)) {
    variables[name] = v.labels;
  }
  return { target: report.vocabulary.target, variables };
}

export class App {
  private readonly session: Session = { config: defaultConfig(), table: defaultTableState() };

  constructor(
    private readonly root: HTMLElement,
    private readonly client: Client = new Client(),
  ) {}

  start(): void {
    this.render();
  }

  private render(): void {
    this.root.replaceChildren(
      el("h1", {}, "rulelens"),
      this.uploadPanel(),
      this.configPanel(),
      this.resultPanel(),
    );
  }

  private uploadPanel(): HTMLElement {
    const status = el("p", { class: "status" });
    const input = el("input", { type: "file", accept: ".csv,text/csv" });
    input.addEventListener("change", async () => {
      const file = input.files?.[0];
      if (!file) return;
      status.textContent = "uploading…";
      try {
        this.session.dataset = await this.client.uploadDataset(file);
        this.session.config.target =
          this.session.dataset.columns[this.session.dataset.columns.length - 1]?.name ?? "";
        this.render();
      } catch (err) {
        status.textContent = `upload failed: ${(err as Error).message}`;
      }
    });
    const panel = el("section", { class: "panel upload" }, el("h2", {}, "dataset"), input, status);

    const ds = this.session.dataset;
    if (ds) {
      const rows = ds.columns.map((c) =>
        el(
          "tr",
          {},
          el("td", {}, c.name),
          el("td", {}, c.kind),
          el(
            "td",
            {},
            c.kind === "continuous"
              ? `[${fmt(c.min)}, ${fmt(c.max)}]`
              : (c.values ?? []).join(", "),
          ),
          el(
            "td",
            {},
            c.kind === "continuous"
              ? previewPeaks(c.min ?? 0, c.max ?? 0, this.session.config.k_continuous)
                  .map((p) => fmt(p, 2))
                  .join(" / ")
              : "",
          ),
        ),
      );
      panel.append(
        el("p", {}, `${ds.n} records, id ${ds.dataset_id}`),
        el(
          "table",
          { class: "columns" },
          el(
            "thead",
            {},
            el(
              "tr",
              {},
              el("th", {}, "column"),
              el("th", {}, "kind"),
              el("th", {}, "range / categories"),
              el("th", {}, "term peaks (preview)"),
            ),
          ),
          el("tbody", {}, ...rows),
        ),
      );
    }
    return panel;
  }

  private configPanel(): HTMLElement {
    const panel = el("section", { class: "panel config" }, el("h2", {}, "configuration"));
    const ds = this.session.dataset;
    if (!ds) {
      panel.append(el("p", {}, "upload a dataset first"));
      return panel;
    }
    const cfg = this.session.config;

    const targetSelect = el("select", { name: "target" });
    for (const c of ds.columns) {
      const opt = el("option", { value: c.name }, c.name);
      if (c.name === cfg.target) opt.setAttribute("selected", "selected");
      targetSelect.append(opt);
    }
    targetSelect.addEventListener("change", () => {
      cfg.target = targetSelect.value;
    });

    const numeric = (
      label: string,
      value: number,
      apply: (v: number) => void,
      step = "any",
    ): HTMLElement => {
      const input = el("input", { type: "number", value: String(value), step });
      input.addEventListener("change", () => apply(Number(input.value)));
      return el("label", {}, `${label} `, input);
    };

    const correction = el("select", {});
    for (const mode of ["bonferroni", "none"]) {
      const opt = el("option", { value: mode }, mode);
      if (mode === cfg.correction) opt.setAttribute("selected", "selected");
      correction.append(opt);
    }
    correction.addEventListener("change", () => {
      cfg.correction = correction.value as ConfigDraft["correction"];
    });

    const listEditor = (label: string, lines: string[], apply: (v: string[]) => void) => {
      const area = el("textarea", { rows: "3", placeholder: "one rule per line" });
      area.value = lines.join("\n");
      const feedback = el("ul", { class: "line-errors" });
      const check = () => {
        apply(area.value.split("\n").filter((l) => l.trim() && !l.trim().startsWith("#")));
        feedback.replaceChildren();
        if (!this.session.report) return;
        for (const v of validateRuleLines(area.value, vocabOf(this.session.report))) {
          if (!v.ok) feedback.append(el("li", { class: "invalid" }, `${v.line}: ${v.error}`));
        }
      };
      area.addEventListener("input", check);
      return el("label", { class: "list-editor" }, `${label}: `, area, feedback);
    };

    const errors = el("ul", { class: "config-errors" });
    const status = el("p", { class: "status" });
    const submit = el("button", {}, "fit");
    submit.addEventListener("click", async () => {
      const problems = validateConfig(cfg);
      errors.replaceChildren(...problems.map((p) => el("li", {}, p)));
      if (problems.length > 0) return;
      if (this.session.report) {
        const vocab = vocabOf(this.session.report);
        const bad = [...cfg.whitelist, ...cfg.blacklist]
          .map((line) => validateRuleLines(line, vocab))
          .flat()
          .filter((v) => !v.ok);
        if (bad.length > 0) {
          errors.replaceChildren(...bad.map((v) => el("li", {}, `${v.line}: ${v.error}`)));
          return;
        }
      }
      status.textContent = "submitting…";
      try {
        const { job_id } = await this.client.submitJob(ds.dataset_id, {
          target: cfg.target,
          lambda: cfg.lambda,
          alpha: cfg.alpha,
          correction: cfg.correction,
          k_continuous: cfg.k_continuous,
          k_target: cfg.k_target,
          max_antecedents: cfg.max_antecedents,
          whitelist: cfg.whitelist,
          blacklist: cfg.blacklist,
          hide_insignificant: cfg.hide_insignificant,
        });
        this.session.jobId = job_id;
        const record = await this.client.waitForJob(job_id, 1000, (r: JobRecord) => {
          status.textContent = `job ${job_id}: ${r.state}`;
        });
        this.session.report = record.report;
        this.render();
      } catch (err) {
        status.textContent = `fit failed: ${(err as Error).message}`;
      }
    });

    panel.append(
      el("div", { class: "fields" },
        el("label", {}, "target ", targetSelect),
        numeric("lambda", cfg.lambda, (v) => (cfg.lambda = v)),
        numeric("alpha", cfg.alpha, (v) => (cfg.alpha = v)),
        el("label", {}, "correction ", correction),
        numeric("K (predictors)", cfg.k_continuous, (v) => (cfg.k_continuous = v), "1"),
        numeric("K (target)", cfg.k_target, (v) => (cfg.k_target = v), "1"),
        numeric("max antecedents", cfg.max_antecedents, (v) => (cfg.max_antecedents = v), "1"),
      ),
      listEditor("whitelist", cfg.whitelist, (v) => (cfg.whitelist = v)),
      listEditor("blacklist", cfg.blacklist, (v) => (cfg.blacklist = v)),
      errors,
      submit,
      status,
    );
    return panel;
  }

  private resultPanel(): HTMLElement {
    const panel = el("section", { class: "panel results" }, el("h2", {}, "rules"));
    const report = this.session.report;
    if (!report || !this.session.jobId) {
      panel.append(el("p", {}, "no fit yet"));
      return panel;
    }
    const metrics = report.metrics;
    panel.append(
      el(
        "p",
        { class: "metrics" },
        `MAPE ${metrics.MAPE === null ? "–" : fmt(metrics.MAPE, 2) + "%"} · ` +
          `RMSE ${fmt(metrics.RMSE, 2)} · R² ${fmt(metrics.R2, 4)} · n=${report.n}`,
      ),
      el(
        "p",
        {},
        el("a", { href: this.client.reportUrl(this.session.jobId) }, "raw report JSON"),
      ),
    );

    const search = el("input", {
      type: "search",
      placeholder: "Search",
      value: this.session.table.search,
    });
    search.addEventListener("input", () => {
      this.session.table.search = search.value;
      renderTable();
    });
    const hide = el("input", { type: "checkbox" });
    if (this.session.table.hideInsignificant) hide.setAttribute("checked", "checked");
    hide.addEventListener("change", () => {
      this.session.table.hideInsignificant = hide.checked;
      renderTable();
    });
    panel.append(
      el("div", { class: "table-controls" }, search, el("label", {}, hide, " hide insignificant")),
    );

    const tbody = el("tbody", {});
    const header = (label: string, column: SortColumn) => {
      const th = el("th", { class: "sortable" }, label);
      th.addEventListener("click", () => {
        const t = this.session.table;
        if (t.sortColumn === column) t.sortDescending = !t.sortDescending;
        t.sortColumn = column;
        renderTable();
      });
      return th;
    };
    const kTarget = report.vocabulary.variables[report.vocabulary.target].labels.length;

    const renderTable = () => {
      tbody.replaceChildren(
        ...visibleRules(report.rules, this.session.table).map((r: RuleEntry) => {
          const white = el("button", { class: "mini" }, "whitelist");
          white.addEventListener("click", () => {
            this.session.config.whitelist = toggleLine(this.session.config.whitelist, r.text);
            this.render();
          });
          const black = el("button", { class: "mini" }, "blacklist");
          black.addEventListener("click", () => {
            this.session.config.blacklist = toggleLine(this.session.config.blacklist, r.text);
            this.render();
          });
          const trace = el("button", { class: "mini" }, "trace");
          trace.addEventListener("click", () => this.showTrace(r.text));
          return el(
            "tr",
            { class: r.status },
            el("td", {}, r.text),
            el("td", {}, fmt(r.beta)),
            el("td", {}, fmt(r.p)),
            el("td", {}, fmt(r.support)),
            el("td", {}, fmt(r.leverage)),
            el("td", {}, fmt(r.priority)),
            el("td", { class: "trend" }, trendGlyph(r.consequent_index, kTarget)),
            el("td", {}, r.status),
            el("td", {}, white, black, trace),
          );
        }),
      );
    };
    panel.append(
      el(
        "table",
        { class: "rules" },
        el(
          "thead",
          {},
          el(
            "tr",
            {},
            header("rule", "text"),
            header("β", "beta"),
            header("p", "p"),
            header("support", "support"),
            header("leverage", "leverage"),
            header("priority", "priority"),
            el("th", {}, "trend"),
            el("th", {}, "status"),
            el("th", {}, ""),
          ),
        ),
        tbody,
      ),
    );
    renderTable();

    const removed = removedRules(report.rules);
    if (removed.length > 0 || report.warnings.length > 0) {
      panel.append(
        el(
          "details",
          { class: "warnings" },
          el("summary", {}, `warnings (${removed.length} removed rules)`),
          el(
            "ul",
            {},
            ...removed.map((r) => el("li", {}, `${r.text} — ${r.removal_reason ?? ""}`)),
            ...report.warnings.map((w) => el("li", {}, w)),
          ),
        ),
      );
    }

    panel.append(this.tracePanel(), this.inconsistencyPanel());
    return panel;
  }

  private traceTarget?: string;

  private showTrace(ruleText: string): void {
    this.traceTarget = ruleText;
    this.render();
    void this.loadTrace();
  }

  private traceBody = el("tbody", {});

  private async loadTrace(): Promise<void> {
    if (!this.session.jobId || !this.traceTarget) return;
    const entries = await this.client.trace(this.session.jobId, this.traceTarget, 10);
    this.traceBody.replaceChildren(
      ...entries.map((e: TraceEntry) =>
        el(
          "tr",
          {},
          el("td", {}, String(e.record_index)),
          el("td", {}, fmt(e.rho)),
          el("td", {}, JSON.stringify(e.record)),
        ),
      ),
    );
  }

  private tracePanel(): HTMLElement {
    const panel = el("section", { class: "subpanel trace" }, el("h3", {}, "trace"));
    if (!this.traceTarget) {
      panel.append(el("p", {}, "pick a rule to see its driving records"));
      return panel;
    }
    panel.append(
      el("p", {}, this.traceTarget),
      el(
        "table",
        {},
        el(
          "thead",
          {},
          el("tr", {}, el("th", {}, "record"), el("th", {}, "ρ"), el("th", {}, "values")),
        ),
        this.traceBody,
      ),
    );
    return panel;
  }

  private inconsistencyPanel(): HTMLElement {
    const panel = el("section", { class: "subpanel inconsistencies" },
      el("h3", {}, "inconsistencies"));
    const threshold = el("input", { type: "number", value: "0", step: "any", min: "0" });
    const onlySig = el("input", { type: "checkbox" });
    const list = el("ul", {});
    const load = async () => {
      if (!this.session.jobId) return;
      const found: Inconsistency[] = await this.client.inconsistencies(
        this.session.jobId,
        Number(threshold.value) || 0,
        onlySig.checked,
      );
      list.replaceChildren(
        ...(found.length === 0
          ? [el("li", {}, "none found")]
          : found.map((f) =>
              el("li", { class: f.kind }, `[${f.kind}] ${f.rule_a} ⇄ ${f.rule_b} — ${f.detail}`),
            )),
      );
    };
    threshold.addEventListener("change", () => void load());
    onlySig.addEventListener("change", () => void load());
    panel.append(
      el(
        "div",
        { class: "controls" },
        el("label", {}, "β threshold ", threshold),
        el("label", {}, onlySig, " only significant"),
      ),
      list,
    );
    void load();
    return panel;
  }
}
