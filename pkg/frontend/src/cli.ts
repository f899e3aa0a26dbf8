#!/usr/bin/env node
/** depolab-figures --csv frames.csv --kind scaling-at-n [--model m] [--out f.svg] */

import { readFileSync, writeFileSync } from "node:fs";
import { parseFrames, CsvSchemaError } from "./csv.js";
import { FigureKind, makeFigure } from "./figures.js";
import { sig6 } from "./fit.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near '${key}'`);
    }
    out.set(key.slice(2), argv[i + 1]);
  }
  return out;
}

export function main(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
  const csvPath = args.get("csv");
  const kind = args.get("kind") as FigureKind | undefined;
  if (!csvPath || !kind) {
    console.error(
      "usage: depolab-figures --csv frames.csv --kind " +
        "growth-curves|scaling-at-n|critical-contrast [--model m] [--out f.svg]"
    );
    return 1;
  }
  try {
    const rows = parseFrames(readFileSync(csvPath, "utf8"));
    const fig = makeFigure(kind, rows, args.get("model"));
    const outPath = args.get("out") ?? csvPath.replace(/\.csv$/, "") + `_${kind}.svg`;
    writeFileSync(outPath, fig.svg);
    for (const f of fig.fits) {
      console.log(
        `${f.kind}: amplitude=${sig6(f.amplitude)} ` +
          `exponent_or_slope=${sig6(f.exponentOrSlope)} r2=${sig6(f.rSquared)}`
      );
    }
    console.log(`wrote ${outPath}`);
    return 0;
  } catch (e) {
    if (e instanceof CsvSchemaError) {
      console.error(`invalid frames CSV: ${e.message}`);
      return 2;
    }
    console.error(`error: ${(e as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
