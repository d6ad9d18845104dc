/**
 * Display helpers: units, number formatting, equation text, importance
 * shares. Everything here is presentation of service-provided numbers.
 */

import type { EquationJson } from "./api.js";

export const OUTPUT_UNITS: Record<string, string> = {
  length: "µm",
  width: "µm",
  depth: "µm",
  cross_section: "µm²",
  volume: "µm³",
  spatter: "µm³",
};

export const OUTPUT_LABELS: Record<string, string> = {
  length: "Length",
  width: "Width",
  depth: "Depth",
  cross_section: "Cross section",
  volume: "Volume",
  spatter: "Spatter",
};

export function formatValue(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  const magnitude = Math.abs(value);
  if (magnitude !== 0 && (magnitude >= 1e6 || magnitude < 1e-3)) {
    return value.toExponential(3);
  }
  return value.toLocaleString("en-US", { maximumFractionDigits: 2 });
}

export function monomialLabel(exponents: number[], names: string[]): string {
  const parts: string[] = [];
  exponents.forEach((e, i) => {
    if (e === 1) parts.push(names[i]);
    else if (e > 1) parts.push(`${names[i]}^${e}`);
  });
  return parts.join("·");
}

function coefficientText(value: number): string {
  const magnitude = Math.abs(value);
  if (magnitude !== 0 && (magnitude >= 1e7 || magnitude < 1e-3)) {
    return value.toExponential(2);
  }
  return String(value);
}

/** Signed-term rendering of an equation JSON, intercept first. */
export function equationText(eq: EquationJson): string {
  const pieces: string[] = [coefficientText(eq.intercept)];
  for (const term of eq.terms) {
    if (term.coefficient === 0) continue;
    const label = monomialLabel(term.exponents, eq.base_features);
    const sign = term.coefficient < 0 ? "-" : "+";
    pieces.push(`${sign} ${coefficientText(Math.abs(term.coefficient))}·${label}`);
  }
  return pieces.join(" ");
}

export interface ImportanceShare {
  label: string;
  share: number; // percent of the absolute non-intercept coefficient mass
}

/** |coefficient| shares of the served equation's non-intercept terms. */
export function importanceShares(eq: EquationJson, topN = 8): ImportanceShare[] {
  const entries = eq.terms
    .filter((t) => t.coefficient !== 0)
    .map((t) => ({
      label: monomialLabel(t.exponents, eq.base_features),
      magnitude: Math.abs(t.coefficient),
    }));
  const total = entries.reduce((acc, e) => acc + e.magnitude, 0);
  if (total === 0) return [];
  return entries
    .map((e) => ({ label: e.label, share: (100 * e.magnitude) / total }))
    .sort((a, b) => b.share - a.share)
    .slice(0, topN);
}
