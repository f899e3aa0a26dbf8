/** Closed-form least-squares fits, mirroring the simulation tool's `fit`
 * command so figure overlays agree with it digit for digit. */

import { FrameRecord } from "./csv.js";

export interface FitResult {
  kind: "power-law" | "logarithmic";
  amplitude: number;
  exponentOrSlope: number;
  rSquared: number;
}

export type Point = [n: number, y: number];

function leastSquares(x: number[], y: number[]): [number, number, number] {
  const k = x.length;
  const xm = x.reduce((a, b) => a + b, 0) / k;
  const ym = y.reduce((a, b) => a + b, 0) / k;
  let sxx = 0;
  let sxy = 0;
  let sst = 0;
  for (let i = 0; i < k; i++) {
    sxx += (x[i] - xm) ** 2;
    sxy += (x[i] - xm) * (y[i] - ym);
    sst += (y[i] - ym) ** 2;
  }
  const slope = sxy / sxx;
  const intercept = ym - slope * xm;
  let sse = 0;
  for (let i = 0; i < k; i++) {
    sse += (y[i] - (slope * x[i] + intercept)) ** 2;
  }
  const r2 = sst > 0 ? 1 - sse / sst : 1;
  return [slope, intercept, r2];
}

export function fitPowerLaw(points: Point[]): FitResult {
  if (points.length < 3) throw new Error("need at least 3 points");
  if (points.some(([n, y]) => n <= 0 || y <= 0)) {
    throw new Error("power-law fit requires positive values");
  }
  const [slope, intercept, r2] = leastSquares(
    points.map(([n]) => Math.log(n)),
    points.map(([, y]) => Math.log(y))
  );
  return {
    kind: "power-law",
    amplitude: Math.exp(intercept),
    exponentOrSlope: slope,
    rSquared: r2,
  };
}

export function fitLogarithmic(points: Point[]): FitResult {
  if (points.length < 3) throw new Error("need at least 3 points");
  const [slope, intercept, r2] = leastSquares(
    points.map(([n]) => Math.log(n)),
    points.map(([, y]) => y)
  );
  return {
    kind: "logarithmic",
    amplitude: intercept,
    exponentOrSlope: slope,
    rSquared: r2,
  };
}

/** Round half to even, matching the dataset producer's schedule arithmetic. */
export function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  const frac = x - floor;
  if (frac > 0.5) return floor + 1;
  if (frac < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

/** Resolve a schedule expression ("lin:c", "crit:c", plain integers,
 * comma-separated) to concrete deposition counts for one system size. */
export function scheduleTimes(n: number, expr: string): number[] {
  const times = new Set<number>();
  for (const part of expr.split(",")) {
    const p = part.trim();
    if (!p) continue;
    let t: number;
    if (p.startsWith("lin:")) {
      t = roundHalfEven(Number(p.slice(4)) * n);
    } else if (p.startsWith("crit:")) {
      t = roundHalfEven((Number(p.slice(5)) * n) / Math.log(n));
    } else {
      t = parseInt(p, 10);
    }
    if (!Number.isFinite(t) || t <= 0) {
      throw new Error(`schedule entry '${p}' resolves to ${t}`);
    }
    times.add(t);
  }
  return [...times].sort((a, b) => a - b);
}

/** Mean max height per n at the times the expression resolves to; census
 * duplicates per (n, stream, t) collapse to a single observation. */
export function pointsAt(
  rows: FrameRecord[],
  atExpr: string,
  model?: string
): Point[] {
  const seen = new Map<string, { n: number; t: number; mx: number }>();
  for (const r of rows) {
    if (model && r.model !== model) continue;
    seen.set(`${r.n}|${r.stream}|${r.t}`, { n: r.n, t: r.t, mx: r.maxHeight });
  }
  const byN = new Map<number, number[]>();
  for (const { n, t, mx } of seen.values()) {
    const targets = scheduleTimes(n, atExpr);
    if (!targets.includes(t)) continue;
    if (!byN.has(n)) byN.set(n, []);
    byN.get(n)!.push(mx);
  }
  const points: Point[] = [];
  for (const n of [...byN.keys()].sort((a, b) => a - b)) {
    const vals = byN.get(n)!;
    points.push([n, vals.reduce((a, b) => a + b, 0) / vals.length]);
  }
  return points;
}

/** Six-significant-digit formatting used in legends and comparisons. */
export function sig6(x: number): string {
  return Number(x.toPrecision(6)).toString();
}
