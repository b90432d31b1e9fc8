import { describe, expect, it } from "vitest";

import {
  CsvError,
  defaultM,
  defaultXi,
  distinctValues,
  parseResultsCsv,
  seriesOverM,
  seriesOverXi,
} from "../src/csv.js";

const HEADER = "domain,recognizer,fold,xi,m,accuracy,wall_ms";

function csv(...rows: string[]): string {
  return [HEADER, ...rows].join("\n");
}

describe("parseResultsCsv", () => {
  it("parses well-formed rows with typed fields", () => {
    const parsed = parseResultsCsv(
      csv(
        "blocks,em,0,0.25,1,0.18,1200.5",
        "blocks,em,0,0.25,2,0.29,1300.0",
        "blocks,match,0,0.25,1,0.52,80.0",
      ),
    );
    expect(parsed.rejected).toEqual([]);
    expect(parsed.rows).toHaveLength(3);
    expect(parsed.rows[0]).toEqual({
      domain: "blocks",
      recognizer: "em",
      fold: 0,
      xi: 0.25,
      m: 1,
      accuracy: 0.18,
      wallMs: 1200.5,
    });
  });

  it("returns zero rows for empty input and a bare header", () => {
    expect(parseResultsCsv("").rows).toEqual([]);
    expect(parseResultsCsv("\n\n").rows).toEqual([]);
    expect(parseResultsCsv(HEADER).rows).toEqual([]);
    expect(parseResultsCsv(HEADER + "\n").rows).toEqual([]);
  });

  it("rejects the header of a different file format", () => {
    expect(() => parseResultsCsv("a,b,c\n1,2,3")).toThrow(CsvError);
  });

  it("rejects rows with the wrong field count", () => {
    expect(() => parseResultsCsv(csv("blocks,em,0,0.25,1,0.5"))).toThrow(
      /expected 7 fields/,
    );
  });

  it("rejects non-numeric numeric fields", () => {
    expect(() =>
      parseResultsCsv(csv("blocks,em,0,0.25,ten,0.5,100")),
    ).toThrow(/m is not a number/);
  });

  it("drops accuracy outside [0, 1] with a message, keeping other rows", () => {
    const parsed = parseResultsCsv(
      csv(
        "blocks,em,0,0.25,1,1.25,100",
        "blocks,em,0,0.25,2,0.4,100",
        "blocks,em,0,0.25,3,-0.1,100",
      ),
    );
    expect(parsed.rows.map((r) => r.m)).toEqual([2]);
    expect(parsed.rejected).toHaveLength(2);
    expect(parsed.rejected[0]).toContain("line 2");
    expect(parsed.rejected[0]).toContain("outside [0, 1]");
  });
});

describe("series grouping", () => {
  const rows = parseResultsCsv(
    csv(
      "blocks,em,0,0.25,1,0.2,10",
      "blocks,em,1,0.25,1,0.4,10",
      "blocks,em,0,0.25,5,0.5,10",
      "blocks,em,0,0.50,5,0.3,10",
      "blocks,match,0,0.25,1,0.6,10",
      "blocks,match,0,0.25,5,0.9,10",
      "blocks,match,0,0.50,5,0.7,10",
    ),
  ).rows;

  it("averages folds and sorts points along x", () => {
    const series = seriesOverM(rows, 0.25);
    expect(series.map((s) => s.name)).toEqual(["em", "match"]);
    const em = series[0];
    expect(em.points).toEqual([
      { x: 1, y: (0.2 + 0.4) / 2 },
      { x: 5, y: 0.5 },
    ]);
  });

  it("filters to the fixed m for the masking sweep", () => {
    const series = seriesOverXi(rows, 5);
    const match = series.find((s) => s.name === "match")!;
    expect(match.points).toEqual([
      { x: 0.25, y: 0.9 },
      { x: 0.5, y: 0.7 },
    ]);
  });

  it("lists distinct axis values in order", () => {
    expect(distinctValues(rows, "m")).toEqual([1, 5]);
    expect(distinctValues(rows, "xi")).toEqual([0.25, 0.5]);
  });

  it("picks chart defaults from what is present", () => {
    expect(defaultM(rows)).toBe(5);
    expect(defaultXi(rows)).toBe(0.25);
    expect(defaultM([])).toBeNull();
    expect(defaultXi([])).toBeNull();

    const withTen = parseResultsCsv(
      csv("blocks,em,0,0.25,10,0.5,10", "blocks,em,0,0.25,128,0.9,10"),
    ).rows;
    expect(defaultM(withTen)).toBe(10);
  });
});
