/** Spec loading and figure rendering to files. */
import { mkdir, readFile, writeFile } from "fs/promises";
import path from "path";

import { buildSeries, FigureSpec, SpecFile, validateSpec } from "./figure.js";
import { parseCsv, ResultRow, SchemaError } from "./schema.js";
import { renderChart } from "./svg.js";

export async function loadSpec(specPath: string): Promise<SpecFile> {
  const raw = JSON.parse(await readFile(specPath, "utf-8")) as SpecFile;
  if (!raw.figures || raw.figures.length === 0) {
    throw new SchemaError(`${specPath}: spec lists no figures`);
  }
  for (const fig of raw.figures) {
    validateSpec(fig);
  }
  return raw;
}

async function readRows(fig: FigureSpec, baseDir: string): Promise<ResultRow[]> {
  const rows: ResultRow[] = [];
  for (const rel of fig.csv) {
    const file = path.isAbsolute(rel) ? rel : path.join(baseDir, rel);
    rows.push(...parseCsv(await readFile(file, "utf-8"), file));
  }
  return rows;
}

export function defaultLabels(fig: FigureSpec): { xlabel: string; ylabel: string } {
  const xlabel =
    fig.xlabel ??
    { m: "partition sets m", n: "transmit antennas N", snr_db: "SNR (dB)" }[fig.x];
  const ylabel =
    fig.ylabel ?? (fig.yscale === "log" ? "probability" : "rate (bits)");
  return { xlabel, ylabel };
}

export async function renderFigure(
  fig: FigureSpec,
  baseDir: string,
  outDir: string
): Promise<string> {
  const rows = await readRows(fig, baseDir);
  const series = buildSeries(rows, fig);
  const { xlabel, ylabel } = defaultLabels(fig);
  const svg = renderChart({
    title: fig.title ?? fig.id,
    xlabel,
    ylabel,
    yscale: fig.yscale,
    series,
  });
  await mkdir(outDir, { recursive: true });
  const outPath = path.join(outDir, fig.out);
  await writeFile(outPath, svg);
  return outPath;
}

export async function renderAll(specPath: string, outDir: string): Promise<string[]> {
  const spec = await loadSpec(specPath);
  const baseDir = path.dirname(specPath);
  const written: string[] = [];
  for (const fig of spec.figures) {
    written.push(await renderFigure(fig, baseDir, outDir));
  }
  return written;
}
