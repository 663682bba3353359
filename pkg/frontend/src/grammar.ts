/**
 * Rule-language parser and formatter.
 *
 * Grammar (keywords case-insensitive):
 *
 *     rule   := "IF" clause ("AND" clause)* "THEN" clause
 *     clause := ident "IS" term
 *     ident  := bare token or double-quoted string, naming a column
 *     term   := vocabulary label; internal spaces written as underscores
 *               (very_low), or the whole term double-quoted
 *
 * The THEN-clause must be on the target column. This must agree with the
 * server-side parser on every case of the shared grammar corpus.
 */

export interface VocabularySpec {
  target: string;
  variables: Record<string, string[]>;
}

export interface Clause {
  variable: string;
  term: string;
}

export interface ParsedRule {
  antecedents: Clause[];
  consequent: Clause;
}

export class RuleSyntaxError extends Error {
  readonly position: number;

  constructor(message: string, position: number) {
    super(`${message} (at position ${position})`);
    this.position = position;
  }
}

interface Token {
  text: string;
  quoted: boolean;
  pos: number;
}

const TOKEN = /"((?:[^"]|"")*)"|(\S+)/g;

function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  for (const m of text.matchAll(TOKEN)) {
    if (m[1] !== undefined) {
      tokens.push({ text: m[1].replace(/""/g, '"'), quoted: true, pos: m.index ?? 0 });
    } else {
      tokens.push({ text: m[2], quoted: false, pos: m.index ?? 0 });
    }
  }
  return tokens;
}

function resolveColumn(name: string, vocab: VocabularySpec, pos: number): string {
  if (name in vocab.variables) return name;
  const matches = Object.keys(vocab.variables).filter(
    (c) => c.toLowerCase() === name.toLowerCase(),
  );
  if (matches.length === 1) return matches[0];
  throw new RuleSyntaxError(`unknown column '${name}'`, pos);
}

function resolveTerm(
  column: string,
  raw: string,
  quoted: boolean,
  vocab: VocabularySpec,
  pos: number,
): string {
  const candidate = quoted ? raw : raw.replace(/_/g, " ");
  const labels = vocab.variables[column];
  if (labels.includes(candidate)) return candidate;
  const matches = labels.filter((t) => t.toLowerCase() === candidate.toLowerCase());
  if (matches.length === 1) return matches[0];
  throw new RuleSyntaxError(
    `unknown term '${candidate}' for column '${column}' (have ${labels.join(", ")})`,
    pos,
  );
}

export function parseRule(text: string, vocab: VocabularySpec): ParsedRule {
  const tokens = tokenize(text);
  let cursor = 0;

  const peek = (): Token =>
    cursor < tokens.length ? tokens[cursor] : { text: "", quoted: false, pos: text.length };
  const atEnd = (): boolean => cursor >= tokens.length;

  function expectKeyword(kw: string): void {
    const tok = peek();
    if (atEnd() || tok.quoted || tok.text.toUpperCase() !== kw) {
      const got = atEnd() ? "nothing" : `'${tok.text}'`;
      throw new RuleSyntaxError(`expected '${kw}', got ${got}`, tok.pos);
    }
    cursor += 1;
  }

  function parseClause(): Clause {
    let tok = peek();
    if (atEnd()) throw new RuleSyntaxError("expected column name", tok.pos);
    cursor += 1;
    const column = resolveColumn(tok.text, vocab, tok.pos);
    expectKeyword("IS");
    tok = peek();
    if (atEnd()) throw new RuleSyntaxError("expected term after IS", tok.pos);
    cursor += 1;
    const term = resolveTerm(column, tok.text, tok.quoted, vocab, tok.pos);
    return { variable: column, term };
  }

  expectKeyword("IF");
  const clauses: Clause[] = [parseClause()];
  for (;;) {
    const tok = peek();
    if (!atEnd() && !tok.quoted && tok.text.toUpperCase() === "AND") {
      cursor += 1;
      clauses.push(parseClause());
    } else {
      break;
    }
  }
  expectKeyword("THEN");
  const consequent = parseClause();
  if (!atEnd()) {
    throw new RuleSyntaxError(`unexpected trailing input '${peek().text}'`, peek().pos);
  }

  if (consequent.variable !== vocab.target) {
    throw new RuleSyntaxError(
      `consequent must be on the target column '${vocab.target}', got '${consequent.variable}'`,
      0,
    );
  }
  const seen = new Set<string>();
  for (const clause of clauses) {
    if (seen.has(clause.variable)) {
      throw new RuleSyntaxError(`duplicate antecedent variable '${clause.variable}'`, 0);
    }
    if (clause.variable === vocab.target) {
      throw new RuleSyntaxError(`target column '${clause.variable}' cannot be an antecedent`, 0);
    }
    seen.add(clause.variable);
  }
  return { antecedents: clauses, consequent };
}

function formatIdent(name: string): string {
  if (/\s/.test(name) || name.includes('"')) {
    return `"${name.replace(/"/g, '""')}"`;
  }
  return name;
}

function formatTerm(term: string): string {
  if (term.includes("_") || term.includes('"')) {
    return `"${term.replace(/"/g, '""')}"`;
  }
  return term.replace(/ /g, "_");
}

export function formatRule(rule: ParsedRule): string {
  const parts = ["IF"];
  rule.antecedents.forEach((clause, i) => {
    if (i > 0) parts.push("AND");
    parts.push(formatIdent(clause.variable), "IS", formatTerm(clause.term));
  });
  parts.push("THEN", formatIdent(rule.consequent.variable), "IS", formatTerm(rule.consequent.term));
  return parts.join(" ");
}

/** Validate without throwing; used by form inputs. */
export function validateRule(
  text: string,
  vocab: VocabularySpec,
): { ok: true; canonical: string } | { ok: false; error: string } {
  try {
    return { ok: true, canonical: formatRule(parseRule(text, vocab)) };
  } catch (err) {
    if (err instanceof RuleSyntaxError) return { ok: false, error: err.message };
    throw err;
  }
}
