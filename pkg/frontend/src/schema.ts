/**
 * Result-CSV schema shared with the simulation harness.
 *
 * The header line below is the compatibility contract: a file whose header
 * differs byte-for-byte is rejected, so schema drift fails loudly instead
 * of producing silently wrong plots.
 */

export const CSV_HEADER =
  "schema,experiment,algo,model,n,m,n_e,snr_db,metric,value,stderr,trials,seed,wall_time_ms";

export const COLUMNS = CSV_HEADER.split(",");

export class SchemaError extends Error {}

export interface ResultRow {
  schema: string;
  experiment: string;
  algo: string;
  model: string;
  n: number | null;
  m: number | null;
  n_e: number | null;
  snr_db: number | null;
  metric: string;
  value: number;
  stderr: number | null;
  trials: number;
  seed: number;
  wall_time_ms: number | null;
}

function num(cell: string, where: string): number {
  const v = Number(cell);
  if (cell === "" || Number.isNaN(v)) {
    throw new SchemaError(`${where}: expected a number, got ${JSON.stringify(cell)}`);
  }
  return v;
}

function numOrNull(cell: string, where: string): number | null {
  return cell === "" ? null : num(cell, where);
}

export function parseCsv(text: string, source = "<csv>"): ResultRow[] {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: file is empty`);
  }
  if (lines[0] !== CSV_HEADER) {
    throw new SchemaError(
      `${source}: header mismatch\n  expected: ${CSV_HEADER}\n  found:    ${lines[0]}`
    );
  }
  const rows: ResultRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    const where = `${source}:${i + 1}`;
    if (cells.length !== COLUMNS.length) {
      throw new SchemaError(
        `${where}: expected ${COLUMNS.length} cells, found ${cells.length}`
      );
    }
    rows.push({
      schema: cells[0],
      experiment: cells[1],
      algo: cells[2],
      model: cells[3],
      n: numOrNull(cells[4], where),
      m: numOrNull(cells[5], where),
      n_e: numOrNull(cells[6], where),
      snr_db: numOrNull(cells[7], where),
      metric: cells[8],
      value: num(cells[9], where),
      stderr: numOrNull(cells[10], where),
      trials: num(cells[11], where),
      seed: num(cells[12], where),
      wall_time_ms: numOrNull(cells[13], where),
    });
  }
  if (rows.length === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  return rows;
}
