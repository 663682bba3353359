import { describe, expect, it } from "vitest";

import type { RuleEntry } from "../src/api.js";
import {
  defaultConfig,
  defaultTableState,
  previewPeaks,
  removedRules,
  toggleLine,
  trendGlyph,
  validateConfig,
  validateRuleLines,
  visibleRules,
} from "../src/state.js";

function rule(partial: Partial<RuleEntry>): RuleEntry {
  return {
    text: "IF x IS low THEN Y IS low",
    status: "significant",
    support: 0.1,
    leverage: 0.01,
    priority: 0.2,
    provenance: "auto",
    consequent_index: 0,
    beta: 1.0,
    beta_debiased: 1.0,
    z: 2.0,
    p: 0.01,
    ...partial,
  };
}

describe("config validation", () => {
  it("accepts the defaults with a target", () => {
    expect(validateConfig(defaultConfig("Salary"))).toEqual([]);
  });

  it("mirrors the server-side bounds", () => {
    const cfg = defaultConfig("Salary");
    expect(validateConfig({ ...cfg, target: "" })).toContain("target column is required");
    expect(validateConfig({ ...cfg, lambda: -1 })).toContain("lambda must be >= 0");
    expect(validateConfig({ ...cfg, alpha: 1 })).toContain("alpha must be in (0, 1)");
    expect(validateConfig({ ...cfg, alpha: 0 })).toContain("alpha must be in (0, 1)");
    expect(validateConfig({ ...cfg, k_continuous: 2 })).toContain(
      "k_continuous must be in [3, 7]",
    );
    expect(validateConfig({ ...cfg, k_target: 8 })).toContain("k_target must be in [3, 7]");
    expect(validateConfig({ ...cfg, max_antecedents: 0 })).toContain(
      "max_antecedents must be >= 1",
    );
    expect(validateConfig({ ...cfg, max_iter: 0.5 })).toContain(
      "max_iter must be a positive integer",
    );
  });
});

describe("rule list validation", () => {
  const vocab = {
    target: "Salary",
    variables: { Gender: ["female", "male"], Salary: ["low", "medium", "high"] },
  };

  it("skips blanks and comments, flags bad lines", () => {
    const out = validateRuleLines(
      "# note\n\nIF Gender IS female THEN Salary IS low\nIF Bogus IS low THEN Salary IS low\n",
      vocab,
    );
    expect(out).toHaveLength(2);
    expect(out[0]).toMatchObject({ ok: true, canonical: "IF Gender IS female THEN Salary IS low" });
    expect(out[1].ok).toBe(false);
    expect(out[1].error).toContain("unknown column");
  });
});

describe("rule table state", () => {
  const rules: RuleEntry[] = [
    rule({ text: "IF Gender IS female THEN Salary IS low", p: 0.001, priority: 0.9 }),
    rule({ text: "IF GPA IS high THEN Salary IS high", status: "not-significant", p: 0.4 }),
    rule({ text: "IF GPA IS low THEN Salary IS low", status: "removed", beta: null, p: null }),
  ];

  it("hides removed rules and honours hide-insignificant", () => {
    const state = defaultTableState();
    expect(visibleRules(rules, state)).toHaveLength(2);
    expect(visibleRules(rules, { ...state, hideInsignificant: true })).toHaveLength(1);
    expect(removedRules(rules)).toHaveLength(1);
  });

  it("filters by case-insensitive search", () => {
    const state = { ...defaultTableState(), search: "gender" };
    const rows = visibleRules(rules, state);
    expect(rows).toHaveLength(1);
    expect(rows[0].text).toContain("Gender");
  });

  it("sorts by the requested column in both directions", () => {
    const byP = visibleRules(rules, {
      ...defaultTableState(),
      sortColumn: "p",
      sortDescending: false,
    });
    expect(byP.map((r) => r.p)).toEqual([0.001, 0.4]);
    const byPDesc = visibleRules(rules, {
      ...defaultTableState(),
      sortColumn: "p",
      sortDescending: true,
    });
    expect(byPDesc.map((r) => r.p)).toEqual([0.4, 0.001]);
  });
});

describe("presentation helpers", () => {
  it("renders the trend glyph as a position marker", () => {
    expect(trendGlyph(0, 3)).toBe("●··");
    expect(trendGlyph(2, 5)).toBe("··●··");
  });

  it("previews equidistant peaks", () => {
    expect(previewPeaks(0, 10, 3)).toEqual([0, 5, 10]);
    expect(previewPeaks(0, 100, 5)).toEqual([0, 25, 50, 75, 100]);
    expect(previewPeaks(5, 5, 3)).toEqual([]);
    expect(previewPeaks(0, 10, 8)).toEqual([]);
  });

  it("toggles whitelist/blacklist lines", () => {
    const line = "IF Gender IS female THEN Salary IS low";
    expect(toggleLine([], line)).toEqual([line]);
    expect(toggleLine([line], line)).toEqual([]);
  });
});
