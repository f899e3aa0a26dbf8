/** The three figure kinds, all pure functions of the frames CSV. */

import { FrameRecord } from "./csv.js";
import {
  FitResult,
  Point,
  fitLogarithmic,
  fitPowerLaw,
  pointsAt,
  sig6,
} from "./fit.js";
import { Series, renderPlot } from "./svg.js";

export type FigureKind = "growth-curves" | "scaling-at-n" | "critical-contrast";

export interface FigureOutput {
  svg: string;
  /** Fit parameters shown in the legend, for equality checks downstream. */
  fits: FitResult[];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function meanCurve(rows: FrameRecord[], n: number, model?: string): Point[] {
  const seen = new Map<string, { t: number; mx: number }>();
  for (const r of rows) {
    if (r.n !== n) continue;
    if (model && r.model !== model) continue;
    seen.set(`${r.stream}|${r.t}`, { t: r.t, mx: r.maxHeight });
  }
  const byT = new Map<number, number[]>();
  for (const { t, mx } of seen.values()) {
    if (!byT.has(t)) byT.set(t, []);
    byT.get(t)!.push(mx);
  }
  return [...byT.keys()]
    .sort((a, b) => a - b)
    .map((t) => {
      const v = byT.get(t)!;
      return [t, v.reduce((a, b) => a + b, 0) / v.length] as Point;
    });
}

export function growthCurves(rows: FrameRecord[], model?: string): FigureOutput {
  const ns = [...new Set(rows.filter((r) => !model || r.model === model).map((r) => r.n))].sort(
    (a, b) => a - b
  );
  if (ns.length === 0) throw new Error("no rows for the requested model");
  const series: Series[] = ns.map((n, i) => ({
    label: `N = ${n}`,
    points: meanCurve(rows, n, model),
    kind: "line",
    color: PALETTE[i % PALETTE.length],
  }));
  const svg = renderPlot({
    title: "Mean maximal height along the trajectory",
    xLabel: "depositions t",
    yLabel: "mean max height",
    series,
  });
  return { svg, fits: [] };
}

function overlayCurve(fit: FitResult, ns: number[]): Point[] {
  const lo = Math.min(...ns);
  const hi = Math.max(...ns);
  const out: Point[] = [];
  for (let i = 0; i <= 60; i++) {
    const n = lo * Math.pow(hi / lo, i / 60);
    const y =
      fit.kind === "power-law"
        ? fit.amplitude * Math.pow(n, fit.exponentOrSlope)
        : fit.amplitude + fit.exponentOrSlope * Math.log(n);
    out.push([n, y]);
  }
  return out;
}

export function scalingAtN(rows: FrameRecord[], model?: string): FigureOutput {
  const points = pointsAt(rows, "lin:1", model);
  if (points.length < 3) throw new Error("need at least 3 system sizes");
  const fit = fitPowerLaw(points);
  const ns = points.map(([n]) => n);
  const svg = renderPlot({
    title: "Maximal height at t = N",
    xLabel: "N",
    yLabel: "mean max height",
    logX: true,
    logY: true,
    series: [
      { label: "data", points, kind: "markers", color: PALETTE[0] },
      {
        label: `fit ${sig6(fit.amplitude)} * N^${sig6(fit.exponentOrSlope)}`,
        points: overlayCurve(fit, ns),
        kind: "line",
        color: PALETTE[1],
      },
    ],
    legendLines: [`r^2 = ${sig6(fit.rSquared)}`],
  });
  return { svg, fits: [fit] };
}

export function criticalContrast(rows: FrameRecord[], model?: string): FigureOutput {
  const early = pointsAt(rows, "crit:1", model);
  const late = pointsAt(rows, "crit:2", model);
  if (early.length < 3 || late.length < 3) {
    throw new Error("need at least 3 system sizes at both critical times");
  }
  const logFit = fitLogarithmic(early);
  const powFit = fitPowerLaw(late);
  const ns = early.map(([n]) => n);
  const svg = renderPlot({
    title: "Maximal height at the critical timescale",
    xLabel: "N",
    yLabel: "mean max height",
    series: [
      { label: "t = N/ln N", points: early, kind: "markers", color: PALETTE[0] },
      {
        label: `log fit ${sig6(logFit.amplitude)} + ${sig6(logFit.exponentOrSlope)} ln N`,
        points: overlayCurve(logFit, ns),
        kind: "line",
        color: PALETTE[0],
      },
      {
        label: "t = 2N/ln N",
        points: late,
        kind: "markers",
        color: PALETTE[1],
        marker: "square",
      },
      {
        label: `power fit ${sig6(powFit.amplitude)} * N^${sig6(powFit.exponentOrSlope)}`,
        points: overlayCurve(powFit, late.map(([n]) => n)),
        kind: "line",
        color: PALETTE[1],
      },
    ],
  });
  return { svg, fits: [logFit, powFit] };
}

export function makeFigure(
  kind: FigureKind,
  rows: FrameRecord[],
  model?: string
): FigureOutput {
  switch (kind) {
    case "growth-curves":
      return growthCurves(rows, model);
    case "scaling-at-n":
      return scalingAtN(rows, model);
    case "critical-contrast":
      return criticalContrast(rows, model);
    default:
      throw new Error(`unknown figure kind '${kind}'`);
  }
}
