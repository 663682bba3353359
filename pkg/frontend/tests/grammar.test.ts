/**
 * The client-side parser must agree with the server parser on every case
 * of the shared grammar corpus: same validity verdict and, for valid
 * rules, the same canonical text.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { formatRule, parseRule, RuleSyntaxError, validateRule } from "../src/grammar.js";
import type { VocabularySpec } from "../src/grammar.js";

interface CorpusCase {
  input: string;
  valid: boolean;
  canonical?: string;
  error_contains?: string;
}

const corpus = JSON.parse(
  readFileSync(
    join(__dirname, "..", "..", "tests", "fixtures", "rule_grammar_corpus.json"),
    "utf-8",
  ),
) as { vocabulary: VocabularySpec; cases: CorpusCase[] };

describe("shared grammar corpus", () => {
  for (const c of corpus.cases) {
    it(`${c.valid ? "accepts" : "rejects"} ${JSON.stringify(c.input)}`, () => {
      if (c.valid) {
        const rule = parseRule(c.input, corpus.vocabulary);
        expect(formatRule(rule)).toBe(c.canonical);
        // canonical text is a fixed point of parse/format
        expect(formatRule(parseRule(c.canonical!, corpus.vocabulary))).toBe(c.canonical);
      } else {
        expect(() => parseRule(c.input, corpus.vocabulary)).toThrow(RuleSyntaxError);
      }
    });
  }
});

describe("parser details", () => {
  const vocab = corpus.vocabulary;

  it("reports a position in every error", () => {
    for (const c of corpus.cases) {
      if (c.valid) continue;
      try {
        parseRule(c.input, vocab);
        expect.unreachable("should have thrown");
      } catch (err) {
        expect(err).toBeInstanceOf(RuleSyntaxError);
        expect((err as RuleSyntaxError).position).toBeGreaterThanOrEqual(0);
        expect((err as RuleSyntaxError).message).toMatch(/at position \d+/);
      }
    }
  });

  it("validateRule wraps parse results without throwing", () => {
    const good = validateRule("IF Gender IS female THEN Salary IS low", vocab);
    expect(good).toEqual({ ok: true, canonical: "IF Gender IS female THEN Salary IS low" });
    const bad = validateRule("IF Bogus IS low THEN Salary IS low", vocab);
    expect(bad.ok).toBe(false);
    if (!bad.ok) expect(bad.error).toContain("unknown column");
  });

  it("unescapes doubled quotes in quoted tokens", () => {
    const weird: VocabularySpec = {
      target: "Y",
      variables: { 'We"ird': ["low", "high"], Y: ["low", "high"] },
    };
    const rule = parseRule('IF "We""ird" IS low THEN Y IS high', weird);
    expect(rule.antecedents[0].variable).toBe('We"ird');
    expect(formatRule(rule)).toBe('IF "We""ird" IS low THEN Y IS high');
  });
});
