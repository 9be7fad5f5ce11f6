/**
 * Parsing and validation of the simulation study CSVs.
 *
 * The harness writes long-format rows with a fixed column set; anything
 * missing is reported by name so schema drift fails loudly.
 */

import Papa from "papaparse";

export const REQUIRED_COLUMNS = [
  "study",
  "n",
  "s_true",
  "error_family",
  "skedasticity",
  "covariate_mode",
  "estimator",
  "ci_method",
  "statistic",
  "value",
  "mc_se",
  "sims",
] as const;

export class SchemaError extends Error {}

export interface StudyRow {
  study: string;
  n: number;
  sTrue: number;
  errorFamily: string;
  skedasticity: string;
  covariateMode: string;
  estimator: string;
  ciMethod: string;
  statistic: string;
  value: number;
  mcSe: number | null;
  sims: number;
}

export function parseStudyCsv(text: string): StudyRow[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse failure: ${parsed.errors[0].message}`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = REQUIRED_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`missing required columns: ${missing.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new SchemaError("no data rows");
  }
  return parsed.data.map((raw, i) => {
    const num = (field: string): number => {
      const v = Number(raw[field]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`row ${i + 1}: non-numeric ${field} value ${JSON.stringify(raw[field])}`);
      }
      return v;
    };
    return {
      study: raw.study,
      n: num("n"),
      sTrue: num("s_true"),
      errorFamily: raw.error_family,
      skedasticity: raw.skedasticity,
      covariateMode: raw.covariate_mode,
      estimator: raw.estimator,
      ciMethod: raw.ci_method,
      statistic: raw.statistic,
      value: num("value"),
      mcSe: raw.mc_se === "" ? null : num("mc_se"),
      sims: num("sims"),
    };
  });
}
