/** Reader for the frames CSV emitted by the simulation tool. */

export const FRAMES_HEADER = [
  "model",
  "n",
  "seed",
  "stream",
  "t",
  "max_height",
  "second_height",
  "total",
  "census_label",
  "census_count",
  "top_capture",
] as const;

export interface FrameRecord {
  model: string;
  n: number;
  seed: number;
  stream: number;
  t: number;
  maxHeight: number;
  secondHeight: number;
  total: number;
  censusLabel: string;
  censusCount: number;
  topCapture: number;
}

export class CsvSchemaError extends Error {}

function toNumber(raw: string, column: string, line: number): number {
  const v = Number(raw);
  if (raw.trim() === "" || Number.isNaN(v)) {
    throw new CsvSchemaError(
      `line ${line}: column '${column}' is not a number: '${raw}'`
    );
  }
  return v;
}

export function parseFrames(text: string): FrameRecord[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError("empty file");
  }
  const header = lines[0].split(",");
  for (let i = 0; i < FRAMES_HEADER.length; i++) {
    if (header[i] !== FRAMES_HEADER[i]) {
      throw new CsvSchemaError(
        `header mismatch at column ${i + 1}: expected '${FRAMES_HEADER[i]}', ` +
          `found '${header[i] ?? ""}'`
      );
    }
  }
  if (header.length !== FRAMES_HEADER.length) {
    throw new CsvSchemaError(
      `header has ${header.length} columns, expected ${FRAMES_HEADER.length}`
    );
  }
  const out: FrameRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== FRAMES_HEADER.length) {
      throw new CsvSchemaError(
        `line ${i + 1}: ${cells.length} columns, expected ${FRAMES_HEADER.length}`
      );
    }
    out.push({
      model: cells[0],
      n: toNumber(cells[1], "n", i + 1),
      seed: toNumber(cells[2], "seed", i + 1),
      stream: toNumber(cells[3], "stream", i + 1),
      t: toNumber(cells[4], "t", i + 1),
      maxHeight: toNumber(cells[5], "max_height", i + 1),
      secondHeight: toNumber(cells[6], "second_height", i + 1),
      total: toNumber(cells[7], "total", i + 1),
      censusLabel: cells[8],
      censusCount: toNumber(cells[9], "census_count", i + 1),
      topCapture: toNumber(cells[10], "top_capture", i + 1),
    });
  }
  return out;
}
