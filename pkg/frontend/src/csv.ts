/** Typed access to the solver's CSV artifacts. */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class CsvError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvError";
  }
}

export class MissingColumnError extends Error {
  constructor(
    public readonly file: string,
    public readonly column: string,
    available: string[],
  ) {
    super(`${file}: no column "${column}" (has: ${available.join(", ")})`);
    this.name = "MissingColumnError";
  }
}

export interface Table {
  /** Path the table was read from, used in error messages and legends. */
  file: string;
  columns: string[];
  /** Raw cell strings, row major; ragged rows are rejected at parse time. */
  rows: string[][];
}

export function readTable(file: string): Table {
  let text: string;
  try {
    text = readFileSync(file, "utf-8");
  } catch (err) {
    throw new CsvError(`${file}: ${(err as Error).message}`);
  }
  const parsed = Papa.parse<string[]>(text.trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new CsvError(`${file}: ${e.message} (row ${e.row})`);
  }
  const data = parsed.data;
  if (data.length === 0) {
    throw new CsvError(`${file}: empty file`);
  }
  const columns = data[0];
  const rows = data.slice(1);
  if (rows.length === 0) {
    throw new CsvError(`${file}: header only, no data rows`);
  }
  for (const [i, row] of rows.entries()) {
    if (row.length !== columns.length) {
      throw new CsvError(
        `${file}: row ${i + 2} has ${row.length} cells, header has ${columns.length}`,
      );
    }
  }
  return { file, columns, rows };
}

/** Numeric column by name; every cell must parse (inf/nan included). */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumnError(table.file, name, table.columns);
  }
  return table.rows.map((row, i) => {
    const cell = row[idx];
    const v = cell === "inf" ? Infinity : cell === "-inf" ? -Infinity : Number(cell);
    if (Number.isNaN(v) && cell.trim().toLowerCase() !== "nan") {
      throw new CsvError(`${table.file}: row ${i + 2}, column "${name}": not a number: "${cell}"`);
    }
    return v;
  });
}

/** String column by name, for label-valued fields. */
export function textColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumnError(table.file, name, table.columns);
  }
  return table.rows.map((row) => row[idx]);
}
