import { describe, expect, it } from "vitest";

import { RiskRow } from "../src/csv";
import { renderInstancePlot } from "../src/plot";

function row(partial: Partial<RiskRow> & { n: number; meanRisk: number }): RiskRow {
  return {
    instance: 1,
    estimator: "mle",
    S: 4,
    A: 2,
    repeats: 100,
    stderr: 0.01,
    seed: "0",
    ...partial,
  };
}

const INVERSE_LAW: RiskRow[] = [
  row({ n: 10, meanRisk: 0.1 }),
  row({ n: 100, meanRisk: 0.01 }),
  row({ n: 1000, meanRisk: 0.001 }),
];

describe("renderInstancePlot", () => {
  it("draws one marker and one error bar per point", () => {
    const { svg, seriesCount } = renderInstancePlot(1, INVERSE_LAW, {
      logLog: false,
      annotateSlope: false,
    });
    expect(svg).toContain("<svg");
    expect((svg.match(/class="marker"/g) ?? []).length).toBe(3);
    expect((svg.match(/class="errorbar"/g) ?? []).length).toBe(3);
    expect((svg.match(/<polyline/g) ?? []).length).toBe(1);
    expect(seriesCount).toBe(1);
  });

  it("annotates the fitted slope to three decimals", () => {
    const { svg } = renderInstancePlot(1, INVERSE_LAW, {
      logLog: true,
      annotateSlope: true,
    });
    expect(svg).toContain("β̂=-1.000");
  });

  it("drops non-positive risks under log scale with a count", () => {
    const rows = [...INVERSE_LAW, row({ n: 10000, meanRisk: 0 })];
    const { droppedRows, svg } = renderInstancePlot(1, rows, {
      logLog: true,
      annotateSlope: false,
    });
    expect(droppedRows).toBe(1);
    expect((svg.match(/class="marker"/g) ?? []).length).toBe(3);
  });

  it("keeps zero-risk rows on a linear scale", () => {
    const rows = [...INVERSE_LAW, row({ n: 10000, meanRisk: 0 })];
    const { droppedRows } = renderInstancePlot(1, rows, {
      logLog: false,
      annotateSlope: false,
    });
    expect(droppedRows).toBe(0);
  });

  it("renders one legend entry per estimator", () => {
    const rows = [
      ...INVERSE_LAW,
      ...INVERSE_LAW.map((r) => ({ ...r, estimator: "empsel", meanRisk: r.meanRisk / 2 })),
    ];
    const { svg, seriesCount } = renderInstancePlot(1, rows, {
      logLog: true,
      annotateSlope: false,
    });
    expect(seriesCount).toBe(2);
    expect((svg.match(/class="legend"/g) ?? []).length).toBe(2);
  });

  it("is deterministic for equal input", () => {
    const render = () =>
      renderInstancePlot(1, INVERSE_LAW, { logLog: true, annotateSlope: true }).svg;
    expect(render()).toBe(render());
  });
});
