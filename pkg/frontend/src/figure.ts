/**
 * Figure specifications and series extraction.
 *
 * A figure pulls one metric out of the result rows, groups it by the given
 * columns (typically the algorithm), and orders each group along the x
 * axis.  Probability figures use a log axis with a per-point floor of
 * 1 / (10 * trials): a zero-count Monte Carlo cell is censored at the
 * resolution of the run, not a true zero.
 */
import { ResultRow, SchemaError } from "./schema.js";

export type XAxis = "m" | "n" | "snr_db";
export type YScale = "log" | "linear";

export interface FigureSpec {
  id: string;
  csv: string[];
  x: XAxis;
  metric: string;
  yscale: YScale;
  series: string[];
  title?: string;
  xlabel?: string;
  ylabel?: string;
  out: string;
}

export interface SpecFile {
  figures: FigureSpec[];
}

export interface Point {
  x: number;
  y: number;
  lo: number | null;
  hi: number | null;
}

export interface Series {
  label: string;
  points: Point[];
}

const GROUPABLE = new Set(["algo", "model", "n", "m", "n_e", "snr_db", "experiment"]);
const X_COLUMNS = new Set<XAxis>(["m", "n", "snr_db"]);

export function validateSpec(spec: FigureSpec): void {
  if (!spec.id || !spec.out) {
    throw new SchemaError(`figure spec needs id and out (got id=${spec.id})`);
  }
  if (!spec.csv || spec.csv.length === 0) {
    throw new SchemaError(`figure ${spec.id}: no input CSV paths`);
  }
  if (!X_COLUMNS.has(spec.x)) {
    throw new SchemaError(`figure ${spec.id}: unknown x axis ${JSON.stringify(spec.x)}`);
  }
  if (spec.yscale !== "log" && spec.yscale !== "linear") {
    throw new SchemaError(`figure ${spec.id}: yscale must be log or linear`);
  }
  for (const col of spec.series) {
    if (!GROUPABLE.has(col)) {
      throw new SchemaError(`figure ${spec.id}: cannot group by column ${JSON.stringify(col)}`);
    }
  }
}

function cell(row: ResultRow, column: string): string {
  const v = (row as unknown as Record<string, unknown>)[column];
  return v === null || v === undefined ? "" : String(v);
}

export function buildSeries(rows: ResultRow[], spec: FigureSpec): Series[] {
  validateSpec(spec);
  const matching = rows.filter((r) => r.metric === spec.metric);
  if (matching.length === 0) {
    const seen = [...new Set(rows.map((r) => r.metric))].join(", ");
    throw new SchemaError(
      `figure ${spec.id}: no rows with metric ${JSON.stringify(spec.metric)} (metrics present: ${seen})`
    );
  }
  const groups = new Map<string, ResultRow[]>();
  for (const row of matching) {
    const key = spec.series.map((c) => `${c}=${cell(row, c)}`).join(", ") || spec.metric;
    groups.get(key)?.push(row) ?? groups.set(key, [row]);
  }
  const series: Series[] = [];
  for (const [label, members] of groups) {
    const points: Point[] = [];
    for (const row of members) {
      const x = row[spec.x];
      if (x === null) {
        throw new SchemaError(
          `figure ${spec.id}: series ${label} has a row without the ${spec.x} column`
        );
      }
      let y = row.value;
      let lo = row.stderr === null ? null : y - row.stderr;
      let hi = row.stderr === null ? null : y + row.stderr;
      if (spec.yscale === "log") {
        const floor = row.trials > 0 ? 1 / (10 * row.trials) : Number.MIN_VALUE;
        y = Math.max(y, floor);
        if (lo !== null) lo = Math.max(lo, floor);
        if (hi !== null) hi = Math.max(hi, floor);
      }
      points.push({ x, y, lo, hi });
    }
    points.sort((a, b) => a.x - b.x);
    if (points.length === 0) {
      throw new SchemaError(`figure ${spec.id}: series ${label} is empty`);
    }
    series.push({ label, points });
  }
  series.sort((a, b) => (a.label < b.label ? -1 : 1));
  return series;
}
