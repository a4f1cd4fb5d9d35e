/**
 * Minimal CSV reader for the fixed schemas the lab emits.
 *
 * Lines starting with '#' are provenance comments and are skipped.
 * Concatenations of several runs are accepted: a repeated line identical to
 * the header is dropped.
 */

export class CsvError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvError";
  }
}

export interface Table {
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header line found");
  }
  const header = lines[0];
  const columns = header.split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i] === header) continue; // concatenated runs
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(
        `row ${i} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    rows.push(cells);
  }
  if (rows.length === 0) {
    throw new CsvError("empty CSV: header but no data rows");
  }
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new CsvError(`missing required columns: ${missing.join(", ")}`);
  }
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new CsvError(`missing required column: ${name}`);
  return idx;
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((r, k) => {
    const v = Number(r[idx]);
    if (Number.isNaN(v) && r[idx] !== "nan") {
      throw new CsvError(`row ${k + 1}: cell '${r[idx]}' in ${name} is not numeric`);
    }
    return v;
  });
}
