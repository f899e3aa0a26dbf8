import { describe, expect, it } from "vitest";
import {
  fitLogarithmic,
  fitPowerLaw,
  pointsAt,
  roundHalfEven,
  scheduleTimes,
  sig6,
} from "../src/fit.js";
import { parseFrames } from "../src/csv.js";

describe("least-squares fits", () => {
  it("recovers an exact power law", () => {
    const pts: [number, number][] = [100, 200, 400, 800].map((n) => [
      n,
      0.5 * Math.pow(n, 1.044),
    ]);
    const fit = fitPowerLaw(pts);
    expect(fit.amplitude).toBeCloseTo(0.5, 12);
    expect(fit.exponentOrSlope).toBeCloseTo(1.044, 12);
    expect(fit.rSquared).toBeCloseTo(1, 12);
  });

  it("recovers an exact logarithmic law", () => {
    const pts: [number, number][] = [50, 100, 200, 400].map((n) => [
      n,
      3 + 1.957 * Math.log(n),
    ]);
    const fit = fitLogarithmic(pts);
    expect(fit.amplitude).toBeCloseTo(3, 10);
    expect(fit.exponentOrSlope).toBeCloseTo(1.957, 12);
  });

  it("rejects degenerate inputs", () => {
    expect(() => fitPowerLaw([[10, 1], [20, 2]])).toThrow();
    expect(() =>
      fitPowerLaw([
        [10, 1],
        [20, -1],
        [30, 2],
      ])
    ).toThrow();
  });
});

describe("schedule resolution", () => {
  it("matches the dataset producer", () => {
    expect(scheduleTimes(1000, "lin:1")).toEqual([1000]);
    expect(scheduleTimes(1000, "crit:1")).toEqual([145]);
    expect(scheduleTimes(1000, "crit:2")).toEqual([290]);
    expect(scheduleTimes(100, "crit:1,crit:2,lin:1")).toEqual([22, 43, 100]);
  });

  it("rounds half to even", () => {
    expect(roundHalfEven(22.5)).toBe(22);
    expect(roundHalfEven(23.5)).toBe(24);
    expect(roundHalfEven(2.3)).toBe(2);
    expect(roundHalfEven(2.7)).toBe(3);
  });
});

const HEADER =
  "model,n,seed,stream,t,max_height,second_height,total," +
  "census_label,census_count,top_capture";

describe("pointsAt", () => {
  it("collapses census duplicates and averages per n", () => {
    const text = [
      HEADER,
      "polya,10,1,0,10,4,3,10,abs:1,2,0.1",
      "polya,10,1,0,10,4,3,10,abs:2,1,0.1",
      "polya,10,1,1,10,6,2,10,abs:1,2,0.2",
      "polya,10,1,1,10,6,2,10,abs:2,1,0.2",
    ].join("\n");
    const pts = pointsAt(parseFrames(text), "lin:1");
    expect(pts).toEqual([[10, 5]]);
  });

  it("filters by model", () => {
    const text = [
      HEADER,
      "polya,10,1,0,10,4,3,10,-,0,0.1",
      "ballistic,10,1,0,10,8,3,10,-,0,0.1",
    ].join("\n");
    expect(pointsAt(parseFrames(text), "lin:1", "ballistic")).toEqual([[10, 8]]);
  });
});

describe("sig6", () => {
  it("keeps six significant digits", () => {
    expect(sig6(1.0440001234)).toBe("1.044");
    expect(sig6(0.498123456)).toBe("0.498123");
    expect(sig6(1957.654321)).toBe("1957.65");
  });
});
