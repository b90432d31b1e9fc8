// Hand-rolled SVG line charts. String output keeps this testable without
// a DOM and keeps the bundle free of chart dependencies.

import type { Series } from "./csv.js";

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width?: number;
  height?: number;
  /** Vertical range; accuracy charts stay on [0, 1]. */
  yDomain?: [number, number];
}

const PALETTE = [
  "#2c7fb8",
  "#d95f02",
  "#33a02c",
  "#756bb1",
  "#e7298a",
  "#636363",
];

const MARGIN = { top: 30, right: 20, bottom: 42, left: 52 };

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function format(value: number): string {
  if (Number.isInteger(value)) {
    return String(value);
  }
  return value.toFixed(2).replace(/0+$/, "").replace(/\.$/, "");
}

function xTicks(xs: number[]): number[] {
  if (xs.length <= 8) {
    return xs;
  }
  const step = Math.ceil(xs.length / 8);
  const picked = xs.filter((_, i) => i % step === 0);
  if (picked[picked.length - 1] !== xs[xs.length - 1]) {
    picked.push(xs[xs.length - 1]);
  }
  return picked;
}

/** Render a multi-series line chart as standalone SVG markup. */
export function renderLineChart(spec: ChartSpec): string {
  const width = spec.width ?? 560;
  const height = spec.height ?? 300;
  const [y0, y1] = spec.yDomain ?? [0, 1];
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;

  const xs = [
    ...new Set(spec.series.flatMap((s) => s.points.map((p) => p.x))),
  ].sort((a, b) => a - b);
  let xMin = xs.length > 0 ? xs[0] : 0;
  let xMax = xs.length > 0 ? xs[xs.length - 1] : 1;
  if (xMin === xMax) {
    xMin -= 0.5;
    xMax += 0.5;
  }

  const sx = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * innerW;
  const sy = (y: number) => MARGIN.top + (1 - (y - y0) / (y1 - y0)) * innerH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" role="img" class="chart">`,
  );
  parts.push(
    `<text x="${MARGIN.left}" y="18" class="chart-title">${escapeXml(spec.title)}</text>`,
  );

  const yTickCount = 4;
  for (let i = 0; i <= yTickCount; i++) {
    const yv = y0 + ((y1 - y0) * i) / yTickCount;
    const py = sy(yv);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py}" x2="${width - MARGIN.right}" y2="${py}" class="gridline"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${py + 4}" text-anchor="end" class="tick">${format(yv)}</text>`,
    );
  }
  for (const xv of xTicks(xs)) {
    const px = sx(xv);
    parts.push(
      `<line x1="${px}" y1="${height - MARGIN.bottom}" x2="${px}" y2="${height - MARGIN.bottom + 4}" class="axis"/>`,
    );
    parts.push(
      `<text x="${px}" y="${height - MARGIN.bottom + 16}" text-anchor="middle" class="tick">${format(xv)}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${height - MARGIN.bottom}" x2="${width - MARGIN.right}" y2="${height - MARGIN.bottom}" class="axis"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${height - MARGIN.bottom}" class="axis"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${height - 6}" text-anchor="middle" class="axis-label">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="14" y="${MARGIN.top + innerH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${MARGIN.top + innerH / 2})" class="axis-label">${escapeXml(spec.yLabel)}</text>`,
  );

  spec.series.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const coords = series.points.map((p) => `${sx(p.x)},${sy(p.y)}`);
    if (coords.length > 1) {
      parts.push(
        `<polyline points="${coords.join(" ")}" fill="none" stroke="${color}" stroke-width="2"/>`,
      );
    }
    for (const p of series.points) {
      parts.push(
        `<circle cx="${sx(p.x)}" cy="${sy(p.y)}" r="3" fill="${color}"/>`,
      );
    }
    const lx = width - MARGIN.right - 150;
    const ly = MARGIN.top + 8 + idx * 16;
    parts.push(`<rect x="${lx}" y="${ly - 8}" width="10" height="10" fill="${color}"/>`);
    parts.push(
      `<text x="${lx + 14}" y="${ly + 1}" class="legend">${escapeXml(series.name)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
