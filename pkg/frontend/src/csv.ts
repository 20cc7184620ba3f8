/** Reader for the sweep harness CSV schema. */

export interface SweepRow {
  model: string;
  formula: string;
  alpha: number;
  t: number;
  r: number;
  tau: number;
  error: number;
  exp_count: number;
  wall_time_s: number;
}

export const CSV_HEADER =
  "model,formula,alpha,t,r,tau,error,exp_count,wall_time_s";

export class SchemaError extends Error {}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0] !== CSV_HEADER) {
    throw new SchemaError(
      `expected header '${CSV_HEADER}', got '${lines[0] ?? "<empty>"}'`,
    );
  }
  if (lines.length === 1) {
    throw new SchemaError("CSV contains no data rows");
  }
  const rows: SweepRow[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== 9) {
      throw new SchemaError(`expected 9 columns, got ${parts.length}: ${line}`);
    }
    const numeric = parts.slice(2).map(Number);
    if (numeric.some((x) => Number.isNaN(x))) {
      throw new SchemaError(`non-numeric value in row: ${line}`);
    }
    rows.push({
      model: parts[0],
      formula: parts[1],
      alpha: numeric[0],
      t: numeric[1],
      r: numeric[2],
      tau: numeric[3],
      error: numeric[4],
      exp_count: numeric[5],
      wall_time_s: numeric[6],
    });
  }
  return rows;
}
