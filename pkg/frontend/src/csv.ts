// Parser for the eval harness results CSV and the grouping helpers the
// charts are built from.

export const RESULT_HEADER = [
  "domain",
  "recognizer",
  "fold",
  "xi",
  "m",
  "accuracy",
  "wall_ms",
] as const;

export interface ResultRow {
  domain: string;
  recognizer: string;
  fold: number;
  xi: number;
  m: number;
  accuracy: number;
  wallMs: number;
}

export interface ParsedResults {
  rows: ResultRow[];
  /** Human-readable reasons for rows dropped by validation. */
  rejected: string[];
}

/** Structural problem with the CSV itself, surfaced as a banner. */
export class CsvError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvError";
  }
}

function parseNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new CsvError(`line ${line}: ${column} is not a number: "${raw}"`);
  }
  return value;
}

/**
 * Parse results CSV text. Structural faults (wrong header, wrong field
 * count, non-numeric fields) throw CsvError; rows whose accuracy falls
 * outside [0, 1] are dropped with a message instead. Empty input and a
 * bare header both yield zero rows.
 */
export function parseResultsCsv(text: string): ParsedResults {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length === 0) {
    return { rows: [], rejected: [] };
  }
  const header = lines[0].split(",").map((c) => c.trim());
  if (header.join(",") !== RESULT_HEADER.join(",")) {
    throw new CsvError(
      `unexpected header "${lines[0]}"; expected "${RESULT_HEADER.join(",")}"`,
    );
  }
  const rows: ResultRow[] = [];
  const rejected: string[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    const lineNo = i + 1;
    if (fields.length !== RESULT_HEADER.length) {
      throw new CsvError(
        `line ${lineNo}: expected ${RESULT_HEADER.length} fields, got ${fields.length}`,
      );
    }
    const row: ResultRow = {
      domain: fields[0],
      recognizer: fields[1],
      fold: parseNumber(fields[2], "fold", lineNo),
      xi: parseNumber(fields[3], "xi", lineNo),
      m: parseNumber(fields[4], "m", lineNo),
      accuracy: parseNumber(fields[5], "accuracy", lineNo),
      wallMs: parseNumber(fields[6], "wall_ms", lineNo),
    };
    if (row.accuracy < 0 || row.accuracy > 1) {
      rejected.push(
        `line ${lineNo}: accuracy ${row.accuracy} outside [0, 1], row dropped`,
      );
      continue;
    }
    rows.push(row);
  }
  return { rows, rejected };
}

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  name: string;
  points: Point[];
}

export function distinctValues(
  rows: ResultRow[],
  key: "xi" | "m",
): number[] {
  return [...new Set(rows.map((r) => r[key]))].sort((a, b) => a - b);
}

function meanSeries(
  rows: ResultRow[],
  x: "xi" | "m",
): Series[] {
  const byRecognizer = new Map<string, Map<number, { sum: number; n: number }>>();
  for (const row of rows) {
    let perX = byRecognizer.get(row.recognizer);
    if (!perX) {
      perX = new Map();
      byRecognizer.set(row.recognizer, perX);
    }
    const cell = perX.get(row[x]) ?? { sum: 0, n: 0 };
    cell.sum += row.accuracy;
    cell.n += 1;
    perX.set(row[x], cell);
  }
  const names = [...byRecognizer.keys()].sort();
  return names.map((name) => {
    const perX = byRecognizer.get(name)!;
    const points = [...perX.entries()]
      .map(([xv, cell]) => ({ x: xv, y: cell.sum / cell.n }))
      .sort((a, b) => a.x - b.x);
    return { name, points };
  });
}

/** Accuracy vs masking fraction, fold-averaged, at a fixed m. */
export function seriesOverXi(rows: ResultRow[], m: number): Series[] {
  return meanSeries(rows.filter((r) => r.m === m), "xi");
}

/** Accuracy vs suggestion count, fold-averaged, at a fixed xi. */
export function seriesOverM(rows: ResultRow[], xi: number): Series[] {
  return meanSeries(rows.filter((r) => r.xi === xi), "m");
}

/** Default m for the xi chart: 10 when swept, otherwise the largest m. */
export function defaultM(rows: ResultRow[]): number | null {
  const ms = distinctValues(rows, "m");
  if (ms.length === 0) {
    return null;
  }
  return ms.includes(10) ? 10 : ms[ms.length - 1];
}

/** Default xi for the m chart: the smallest one present. */
export function defaultXi(rows: ResultRow[]): number | null {
  const xis = distinctValues(rows, "xi");
  return xis.length > 0 ? xis[0] : null;
}
