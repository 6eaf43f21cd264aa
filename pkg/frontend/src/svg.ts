/**
 * Minimal deterministic SVG line charts: linear or log y axis, stderr error
 * bars, point markers, legend.  No DOM, just strings.
 */
import { Series } from "./figure.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 24, bottom: 56, left: 72 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export interface ChartOptions {
  title: string;
  xlabel: string;
  ylabel: string;
  yscale: "log" | "linear";
  series: Series[];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function linearTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(v);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length ? ticks : [lo];
}

function fmtTick(v: number, log: boolean): string {
  if (log) {
    const e = Math.round(Math.log10(v));
    return `1e${e}`;
  }
  return Math.abs(v) >= 1000 || (v !== 0 && Math.abs(v) < 0.01)
    ? v.toExponential(0)
    : String(Number(v.toFixed(4)));
}

export function renderChart(opts: ChartOptions): string {
  const { series, yscale } = opts;
  if (series.length === 0) {
    throw new Error("nothing to plot: no series");
  }
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) =>
    s.points.flatMap((p) => [p.y, p.lo ?? p.y, p.hi ?? p.y])
  );
  let xMin = Math.min(...xs);
  let xMax = Math.max(...xs);
  if (xMin === xMax) {
    xMin -= 1;
    xMax += 1;
  }
  let yMin = Math.min(...ys);
  let yMax = Math.max(...ys);
  if (yscale === "log") {
    yMin = Math.pow(10, Math.floor(Math.log10(yMin)));
    yMax = Math.pow(10, Math.ceil(Math.log10(yMax)));
    if (yMin === yMax) {
      yMax *= 10;
    }
  } else {
    const pad = (yMax - yMin || 1) * 0.08;
    yMin -= pad;
    yMax += pad;
  }

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const sy = (y: number) => {
    const t =
      yscale === "log"
        ? (Math.log10(y) - Math.log10(yMin)) / (Math.log10(yMax) - Math.log10(yMin))
        : (y - yMin) / (yMax - yMin);
    return MARGIN.top + (1 - t) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${esc(opts.title)}</text>`
  );

  const yTicks = yscale === "log" ? decadeTicks(yMin, yMax) : linearTicks(yMin, yMax);
  for (const v of yTicks) {
    const y = sy(v);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${WIDTH - MARGIN.right}" ` +
        `y2="${y.toFixed(2)}" stroke="#ddd"/>`
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${(y + 4).toFixed(2)}" text-anchor="end" ` +
        `font-size="11">${fmtTick(v, yscale === "log")}</text>`
    );
  }
  for (const v of linearTicks(xMin, xMax)) {
    const x = sx(v);
    parts.push(
      `<line x1="${x.toFixed(2)}" y1="${MARGIN.top}" x2="${x.toFixed(2)}" ` +
        `y2="${HEIGHT - MARGIN.bottom}" stroke="#eee"/>`
    );
    parts.push(
      `<text x="${x.toFixed(2)}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle" ` +
        `font-size="11">${fmtTick(v, false)}</text>`
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#444"/>`
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" text-anchor="middle" ` +
      `font-size="13">${esc(opts.xlabel)}</text>`
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${esc(opts.ylabel)}</text>`
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const path = s.points
      .map((p, j) => `${j === 0 ? "M" : "L"}${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
      .join(" ");
    parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="1.6"/>`);
    for (const p of s.points) {
      const x = sx(p.x);
      if (p.lo !== null && p.hi !== null && p.hi > p.lo) {
        const y1 = sy(p.hi);
        const y2 = sy(p.lo);
        parts.push(
          `<g class="error-bar" stroke="${color}">` +
            `<line x1="${x.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x.toFixed(2)}" y2="${y2.toFixed(2)}"/>` +
            `<line x1="${(x - 3).toFixed(2)}" y1="${y1.toFixed(2)}" x2="${(x + 3).toFixed(2)}" y2="${y1.toFixed(2)}"/>` +
            `<line x1="${(x - 3).toFixed(2)}" y1="${y2.toFixed(2)}" x2="${(x + 3).toFixed(2)}" y2="${y2.toFixed(2)}"/>` +
            `</g>`
        );
      }
      parts.push(
        `<circle cx="${x.toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="2.6" fill="${color}"/>`
      );
    }
  });

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = MARGIN.top + 10 + 16 * i;
    const x = WIDTH - MARGIN.right - 180;
    parts.push(`<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${x + 28}" y="${y + 4}" font-size="11">${esc(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
