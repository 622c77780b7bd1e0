/**
 * SVG rendering of one instance panel: one series per estimator, markers at
 * each sample size with stderr error bars, optional log-log axes and fitted
 * slope in the legend. Rendering is a pure function of the parsed rows, so a
 * given CSV always produces the same image.
 */

import { RiskRow } from "./csv";
import { fitRate, RegressionError } from "./ols";

export interface PlotOptions {
  logLog: boolean;
  annotateSlope: boolean;
  width?: number;
  height?: number;
}

export interface RenderResult {
  svg: string;
  droppedRows: number;
  seriesCount: number;
}

const COLORS: Record<string, string> = {
  mle: "#1f77b4",
  empce: "#d62728",
  empsel: "#2ca02c",
  fullkl: "#9467bd",
};

const MARGIN = { top: 36, right: 24, bottom: 48, left: 72 };

function color(estimator: string): string {
  return COLORS[estimator] ?? "#7f7f7f";
}

function fmt(value: number): string {
  return Number(value.toFixed(3)).toString();
}

function fmtTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 0.01 && magnitude < 100000) {
    return Number(value.toPrecision(6)).toString();
  }
  return value.toExponential(0).replace("+", "");
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function linearTicks(lo: number, hi: number, count = 5): number[] {
  if (hi === lo) return [lo];
  const ticks: number[] = [];
  for (let i = 0; i <= count; i++) ticks.push(lo + ((hi - lo) * i) / count);
  return ticks;
}

export function renderInstancePlot(
  instance: number,
  rows: RiskRow[],
  opts: PlotOptions,
): RenderResult {
  const width = opts.width ?? 640;
  const height = opts.height ?? 480;
  const kept = opts.logLog ? rows.filter((r) => r.meanRisk > 0) : rows.slice();
  const droppedRows = rows.length - kept.length;
  if (kept.length === 0) {
    throw new RegressionError(`instance ${instance}: no plottable rows`);
  }

  const series = new Map<string, RiskRow[]>();
  for (const row of kept) {
    const bucket = series.get(row.estimator) ?? [];
    bucket.push(row);
    series.set(row.estimator, bucket);
  }
  for (const bucket of series.values()) bucket.sort((a, b) => a.n - b.n);
  const estimators = [...series.keys()].sort();

  const xs = kept.map((r) => r.n);
  const lowerEdge = (r: RiskRow) =>
    opts.logLog ? r.meanRisk : Math.max(r.meanRisk - r.stderr, 0);
  const ys = kept.flatMap((r) => [lowerEdge(r), r.meanRisk + r.stderr, r.meanRisk]);
  const positiveYs = ys.filter((y) => y > 0);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLo = opts.logLog ? Math.min(...positiveYs) : Math.min(...ys);
  const yHi = opts.logLog ? Math.max(...positiveYs) : Math.max(...ys, 1e-300);

  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const xPos = (n: number) => {
    if (xHi === xLo) return MARGIN.left + plotW / 2;
    const t = opts.logLog
      ? (Math.log(n) - Math.log(xLo)) / (Math.log(xHi) - Math.log(xLo))
      : (n - xLo) / (xHi - xLo);
    return MARGIN.left + t * plotW;
  };
  const yPos = (v: number) => {
    if (yHi === yLo) return MARGIN.top + plotH / 2;
    const clamped = opts.logLog ? Math.max(v, yLo) : v;
    const t = opts.logLog
      ? (Math.log(clamped) - Math.log(yLo)) / (Math.log(yHi) - Math.log(yLo))
      : (clamped - yLo) / (yHi - yLo);
    return MARGIN.top + plotH - t * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">` +
      `instance ${instance}</text>`,
  );

  // Axes.
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}" stroke="black"/>`,
    `<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`,
  );
  const xTicks = opts.logLog ? [...new Set(xs)].sort((a, b) => a - b) : linearTicks(xLo, xHi);
  for (const tick of xTicks.slice(0, 12)) {
    const px = xPos(tick);
    parts.push(
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`,
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmtTick(tick)}</text>`,
    );
  }
  const yTicks = opts.logLog ? decadeTicks(yLo, yHi) : linearTicks(yLo, yHi);
  for (const tick of yTicks.slice(0, 12)) {
    const py = yPos(tick);
    parts.push(
      `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`,
      `<text x="${x0 - 8}" y="${py + 4}" text-anchor="end">${fmtTick(tick)}</text>`,
    );
  }
  parts.push(
    `<text x="${x0 + plotW / 2}" y="${height - 10}" text-anchor="middle">n</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">mean risk</text>`,
  );

  // Series: error bars, polyline, markers, legend entry.
  estimators.forEach((estimator, index) => {
    const bucket = series.get(estimator)!;
    const stroke = color(estimator);
    parts.push(`<g class="series" data-estimator="${estimator}">`);
    for (const row of bucket) {
      const px = xPos(row.n);
      const top = yPos(row.meanRisk + row.stderr);
      const bottom = yPos(lowerEdge(row));
      parts.push(
        `<g class="errorbar">` +
          `<line x1="${px}" y1="${top}" x2="${px}" y2="${bottom}" stroke="${stroke}"/>` +
          `<line x1="${px - 3}" y1="${top}" x2="${px + 3}" y2="${top}" stroke="${stroke}"/>` +
          `<line x1="${px - 3}" y1="${bottom}" x2="${px + 3}" y2="${bottom}" stroke="${stroke}"/>` +
          `</g>`,
      );
    }
    const path = bucket
      .map((row) => `${xPos(row.n).toFixed(2)},${yPos(row.meanRisk).toFixed(2)}`)
      .join(" ");
    parts.push(`<polyline points="${path}" fill="none" stroke="${stroke}" stroke-width="1.5"/>`);
    for (const row of bucket) {
      parts.push(
        `<circle class="marker" cx="${xPos(row.n).toFixed(2)}" ` +
          `cy="${yPos(row.meanRisk).toFixed(2)}" r="3" fill="${stroke}"/>`,
      );
    }
    parts.push(`</g>`);

    let label = estimator;
    if (opts.annotateSlope) {
      try {
        const fit = fitRate(bucket.map((row) => [row.n, row.meanRisk]));
        label += ` β̂=${fit.slope.toFixed(3)}`;
      } catch (err) {
        if (!(err instanceof RegressionError)) throw err;
      }
    }
    const ly = MARGIN.top + 14 + 16 * index;
    parts.push(
      `<rect x="${x0 + plotW - 150}" y="${ly - 9}" width="10" height="10" fill="${stroke}"/>`,
      `<text class="legend" x="${x0 + plotW - 136}" y="${ly}">${label}</text>`,
    );
  });

  parts.push("</svg>");
  return { svg: parts.join("\n") + "\n", droppedRows, seriesCount: estimators.length };
}

export function seriesSlopes(rows: RiskRow[]): Map<string, number> {
  const grouped = new Map<string, Array<[number, number]>>();
  for (const row of rows) {
    const bucket = grouped.get(row.estimator) ?? [];
    bucket.push([row.n, row.meanRisk]);
    grouped.set(row.estimator, bucket);
  }
  const slopes = new Map<string, number>();
  for (const [estimator, points] of grouped) {
    slopes.set(estimator, fitRate(points).slope);
  }
  return slopes;
}

export { fmt };
