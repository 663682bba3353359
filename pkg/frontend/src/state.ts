/**
 * Pure UI state helpers: config validation, rule-table filtering and
 * sorting, list validation, membership previews. No DOM access, so all
 * of it is unit-testable. Every displayed number still comes from the
 * API; the only client-side arithmetic is the upload-time membership
 * preview, which is presentation.
 */

import type { RuleEntry } from "./api.js";
import { validateRule, type VocabularySpec } from "./grammar.js";

export interface ConfigDraft {
  target: string;
  lambda: number;
  max_iter: number;
  alpha: number;
  correction: "none" | "bonferroni";
  k_continuous: number;
  k_target: number;
  max_antecedents: number;
  whitelist: string[];
  blacklist: string[];
  hide_insignificant: boolean;
}

export function defaultConfig(target = ""): ConfigDraft {
  return {
    target,
    lambda: 0.1,
    max_iter: 1000,
    alpha: 0.05,
    correction: "bonferroni",
    k_continuous: 3,
    k_target: 3,
    max_antecedents: 2,
    whitelist: [],
    blacklist: [],
    hide_insignificant: false,
  };
}

/** Same bounds the server enforces; invalid drafts never reach the API. */
export function validateConfig(draft: ConfigDraft): string[] {
  const errors: string[] = [];
  if (!draft.target) errors.push("target column is required");
  if (!(draft.lambda >= 0)) errors.push("lambda must be >= 0");
  if (!Number.isInteger(draft.max_iter) || draft.max_iter < 1) {
    errors.push("max_iter must be a positive integer");
  }
  if (!(draft.alpha > 0 && draft.alpha < 1)) errors.push("alpha must be in (0, 1)");
  for (const key of ["k_continuous", "k_target"] as const) {
    const k = draft[key];
    if (!Number.isInteger(k) || k < 3 || k > 7) errors.push(`${key} must be in [3, 7]`);
  }
  if (!Number.isInteger(draft.max_antecedents) || draft.max_antecedents < 1) {
    errors.push("max_antecedents must be >= 1");
  }
  return errors;
}

export interface LineValidation {
  line: string;
  ok: boolean;
  canonical?: string;
  error?: string;
}

/** Validate whitelist/blacklist textarea content, one rule per line. */
export function validateRuleLines(text: string, vocab: VocabularySpec): LineValidation[] {
  const out: LineValidation[] = [];
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const result = validateRule(line, vocab);
    if (result.ok) {
      out.push({ line, ok: true, canonical: result.canonical });
    } else {
      out.push({ line, ok: false, error: result.error });
    }
  }
  return out;
}

export interface TableState {
  search: string;
  hideInsignificant: boolean;
  sortColumn: SortColumn;
  sortDescending: boolean;
}

export type SortColumn = "text" | "beta" | "p" | "support" | "leverage" | "priority";

export function defaultTableState(): TableState {
  return { search: "", hideInsignificant: false, sortColumn: "priority", sortDescending: true };
}

export function visibleRules(rules: RuleEntry[], state: TableState): RuleEntry[] {
  const needle = state.search.toLowerCase();
  const rows = rules.filter((r) => {
    if (r.status === "removed") return false;
    if (state.hideInsignificant && r.status !== "significant") return false;
    return !needle || r.text.toLowerCase().includes(needle);
  });
  const key = (r: RuleEntry): number | string => {
    switch (state.sortColumn) {
      case "text":
        return r.text;
      case "beta":
        return r.beta ?? 0;
      case "p":
        return r.p ?? 1;
      case "support":
        return r.support;
      case "leverage":
        return r.leverage;
      case "priority":
        return r.priority;
    }
  };
  rows.sort((a, b) => {
    const ka = key(a);
    const kb = key(b);
    const cmp = typeof ka === "string" ? ka.localeCompare(kb as string) : ka - (kb as number);
    return state.sortDescending ? -cmp : cmp;
  });
  return rows;
}

export function removedRules(rules: RuleEntry[]): RuleEntry[] {
  return rules.filter((r) => r.status === "removed");
}

/**
 * Trend glyph: a position marker on the consequent term scale,
 * e.g. index 2 of 5 terms renders "· · ● · ·" compressed to "··●··".
 */
export function trendGlyph(consequentIndex: number, termCount: number): string {
  return Array.from({ length: termCount }, (_, i) => (i === consequentIndex ? "●" : "·")).join("");
}

/**
 * Membership preview for a continuous column: equidistant triangular
 * layout with shouldered ends, K peaks between min and max. Preview
 * only — the authoritative vocabulary arrives with the report.
 */
export function previewPeaks(min: number, max: number, k: number): number[] {
  if (!(max > min) || k < 3 || k > 7) return [];
  return Array.from({ length: k }, (_, i) => min + (i * (max - min)) / (k - 1));
}

/** Toggle a rule in or out of a whitelist/blacklist draft. */
export function toggleLine(lines: string[], canonical: string): string[] {
  return lines.includes(canonical)
    ? lines.filter((l) => l !== canonical)
    : [...lines, canonical];
}
