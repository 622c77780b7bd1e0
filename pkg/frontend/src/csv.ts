/** Parser for the risk-sweep CSV emitted by `transferlab simulate`. */

export const CSV_HEADER =
  "instance,estimator,S,A,n,repeats,mean_risk,stderr,seed";

export interface RiskRow {
  instance: number;
  estimator: string;
  S: number;
  A: number;
  n: number;
  repeats: number;
  meanRisk: number;
  stderr: number;
  seed: string;
}

export class CsvError extends Error {}

function parseIntField(raw: string, field: string, line: number): number {
  const value = Number(raw);
  if (!Number.isInteger(value)) {
    throw new CsvError(`line ${line}: ${field} is not an integer: ${raw}`);
  }
  return value;
}

function parseFloatField(raw: string, field: string, line: number): number {
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new CsvError(`line ${line}: ${field} is not a number: ${raw}`);
  }
  return value;
}

export function parseRiskCsv(text: string): RiskRow[] {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || lines[0] !== CSV_HEADER) {
    throw new CsvError(`line 1: expected header "${CSV_HEADER}"`);
  }
  const rows: RiskRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line === "") continue;
    const fields = line.split(",");
    if (fields.length !== 9) {
      throw new CsvError(`line ${i + 1}: expected 9 fields, got ${fields.length}`);
    }
    rows.push({
      instance: parseIntField(fields[0], "instance", i + 1),
      estimator: fields[1],
      S: parseIntField(fields[2], "S", i + 1),
      A: parseIntField(fields[3], "A", i + 1),
      n: parseIntField(fields[4], "n", i + 1),
      repeats: parseIntField(fields[5], "repeats", i + 1),
      meanRisk: parseFloatField(fields[6], "mean_risk", i + 1),
      stderr: parseFloatField(fields[7], "stderr", i + 1),
      seed: fields[8],
    });
  }
  return rows;
}
