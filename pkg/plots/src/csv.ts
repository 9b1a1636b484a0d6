/**
 * Reader for the benchmark convergence CSVs.
 *
 * The files carry a fixed header; this parser is header-driven so column
 * order never matters here, and a requested column that is absent fails
 * loudly with the column named. Empty cells become null (the runner writes
 * them for quantities a method does not define).
 */

import { readFileSync, readdirSync, statSync } from "node:fs";
import { basename, dirname, join } from "node:path";

export class MissingColumnError extends Error {
  readonly column: string;

  constructor(column: string, file: string, header: string[]) {
    super(
      `column "${column}" not found in ${file}; header has: ${header.join(", ")}`,
    );
    this.column = column;
  }
}

export interface CsvTable {
  file: string;
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, file = "<string>"): CsvTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${file}: empty CSV`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `${file}: row ${i + 1} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    return cells;
  });
  return { file, header, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf-8"), path);
}

export function columnIndex(table: CsvTable, column: string): number {
  const idx = table.header.indexOf(column);
  if (idx < 0) {
    throw new MissingColumnError(column, table.file, table.header);
  }
  return idx;
}

/** Numeric column; empty cells map to null. */
export function numericColumn(table: CsvTable, column: string): (number | null)[] {
  const idx = columnIndex(table, column);
  return table.rows.map((row) => {
    const cell = row[idx];
    if (cell === "") return null;
    const value = Number(cell);
    if (Number.isNaN(value)) {
      throw new Error(`${table.file}: non-numeric value "${cell}" in column ${column}`);
    }
    return value;
  });
}

export function stringColumn(table: CsvTable, column: string): string[] {
  const idx = columnIndex(table, column);
  return table.rows.map((row) => row[idx]);
}

/**
 * Group label for a row. Plain columns are read as-is; "p", "n" (Stiefel)
 * and "d" (sphere) derive from the dims column ("40x6" or "100").
 */
export function groupValue(table: CsvTable, row: string[], key: string): string {
  const direct = table.header.indexOf(key);
  if (direct >= 0) {
    return row[direct];
  }
  if (key === "p" || key === "n" || key === "d") {
    const dims = row[columnIndex(table, "dims")];
    const parts = dims.split("x");
    if (key === "d") {
      return parts[0];
    }
    if (parts.length === 2) {
      return key === "n" ? parts[0] : parts[1];
    }
    throw new Error(
      `${table.file}: cannot derive "${key}" from dims "${dims}" (sphere data?)`,
    );
  }
  throw new MissingColumnError(key, table.file, table.header);
}

/** Expand a glob pattern (supports * and ? in the basename only). */
export function expandGlob(pattern: string): string[] {
  const dir = dirname(pattern);
  const base = basename(pattern);
  if (!base.includes("*") && !base.includes("?")) {
    statSync(pattern); // throws if missing
    return [pattern];
  }
  const regex = new RegExp(
    "^" +
      base
        .replace(/[.+^${}()|[\]\\]/g, "\\$&")
        .replace(/\*/g, ".*")
        .replace(/\?/g, ".") +
      "$",
  );
  let names: string[];
  try {
    names = readdirSync(dir);
  } catch {
    return [];
  }
  return names
    .filter((name) => regex.test(name))
    .sort()
    .map((name) => join(dir, name));
}
