import { readFileSync } from "node:fs";
import Papa from "papaparse";

export interface Row {
  experiment: string;
  provenance: string;
  n: number | null;
  p: number | null;
  epsilon: number | null;
  eta: number | null;
  metric: string;
  value: number;
}

export const HEADER = [
  "experiment",
  "provenance",
  "n",
  "p",
  "epsilon",
  "eta",
  "metric",
  "value",
];

export class SchemaError extends Error {}

function num(field: string): number | null {
  return field === "" ? null : Number(field);
}

/** Parse a coolsim result table and validate it against the fixed schema. */
export function parseCsv(path: string): Row[] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new SchemaError(`cannot read ${path}`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`malformed CSV in ${path}: ${parsed.errors[0].message}`);
  }
  const lines = parsed.data;
  if (lines.length === 0 || lines[0].join(",") !== HEADER.join(",")) {
    throw new SchemaError(`missing or wrong header in ${path}`);
  }
  const rows: Row[] = [];
  for (const [i, fields] of lines.slice(1).entries()) {
    if (fields.length !== HEADER.length) {
      throw new SchemaError(`row ${i + 2}: expected ${HEADER.length} columns, got ${fields.length}`);
    }
    const value = Number(fields[7]);
    if (fields[7] === "" || Number.isNaN(value)) {
      throw new SchemaError(`row ${i + 2}: value ${JSON.stringify(fields[7])} is not a number`);
    }
    rows.push({
      experiment: fields[0],
      provenance: fields[1],
      n: num(fields[2]),
      p: num(fields[3]),
      epsilon: num(fields[4]),
      eta: num(fields[5]),
      metric: fields[6],
      value,
    });
  }
  if (rows.length === 0) {
    throw new SchemaError(`no rows in ${path}`);
  }
  return rows;
}

/** Index part of a metric like "population[17]" -> 17. */
export function metricIndex(metric: string): number | null {
  const m = metric.match(/\[(\d+)\]$/);
  return m ? Number(m[1]) : null;
}

export function metricBase(metric: string): string {
  return metric.replace(/\[\d+\]$/, "");
}
