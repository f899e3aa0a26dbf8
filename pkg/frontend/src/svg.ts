/** Tiny dependency-free SVG scatter/line plotting. */

export interface Series {
  label: string;
  points: [number, number][];
  kind: "markers" | "line";
  color: string;
  marker?: "circle" | "square";
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logX?: boolean;
  logY?: boolean;
  legendLines?: string[];
}

const W = 640;
const H = 440;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderPlot(spec: PlotSpec): string {
  const xs = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p[1]));
  if (xs.length === 0) throw new Error("nothing to plot");
  const tx = (v: number) => (spec.logX ? Math.log10(v) : v);
  const ty = (v: number) => (spec.logY ? Math.log10(v) : v);
  const x0 = Math.min(...xs.map(tx));
  const x1 = Math.max(...xs.map(tx));
  const y0 = Math.min(...ys.map(ty));
  const y1 = Math.max(...ys.map(ty));
  const padX = (x1 - x0 || 1) * 0.05;
  const padY = (y1 - y0 || 1) * 0.05;
  const sx = (v: number) =>
    MARGIN.left +
    ((tx(v) - x0 + padX) / (x1 - x0 + 2 * padX)) * (W - MARGIN.left - MARGIN.right);
  const sy = (v: number) =>
    H -
    MARGIN.bottom -
    ((ty(v) - y0 + padY) / (y1 - y0 + 2 * padY)) * (H - MARGIN.top - MARGIN.bottom);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">`
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(
    `<text x="${W / 2}" y="24" text-anchor="middle" font-size="16">${esc(spec.title)}</text>`
  );
  // axes
  parts.push(
    `<line x1="${MARGIN.left}" y1="${H - MARGIN.bottom}" x2="${W - MARGIN.right}" y2="${H - MARGIN.bottom}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${H - MARGIN.bottom}" stroke="black"/>`,
    `<text x="${W / 2}" y="${H - 12}" text-anchor="middle" font-size="13">${esc(spec.xLabel)}</text>`,
    `<text x="18" y="${H / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${H / 2})">${esc(spec.yLabel)}</text>`
  );
  for (const s of spec.series) {
    if (s.kind === "line") {
      const d = s.points
        .map(([x, y], i) => `${i === 0 ? "M" : "L"}${sx(x).toFixed(2)},${sy(y).toFixed(2)}`)
        .join(" ");
      parts.push(
        `<path d="${d}" fill="none" stroke="${s.color}" stroke-width="1.5" data-label="${esc(s.label)}"/>`
      );
    } else {
      for (const [x, y] of s.points) {
        if (s.marker === "square") {
          parts.push(
            `<rect x="${(sx(x) - 3).toFixed(2)}" y="${(sy(y) - 3).toFixed(2)}" width="6" height="6" fill="${s.color}" data-label="${esc(s.label)}"/>`
          );
        } else {
          parts.push(
            `<circle cx="${sx(x).toFixed(2)}" cy="${sy(y).toFixed(2)}" r="3.5" fill="${s.color}" data-label="${esc(s.label)}"/>`
          );
        }
      }
    }
  }
  const legend = [
    ...spec.series.map((s) => s.label),
    ...(spec.legendLines ?? []),
  ];
  legend.forEach((line, i) => {
    parts.push(
      `<text x="${W - MARGIN.right - 8}" y="${MARGIN.top + 16 + 16 * i}" text-anchor="end" font-size="12" class="legend">${esc(line)}</text>`
    );
  });
  parts.push("</svg>");
  return parts.join("\n");
}
