import * as fs from "fs";

export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, string>[];
}

export class SchemaError extends Error {
  constructor(path: string, detail: string) {
    super(`${path}: ${detail}`);
    this.name = "SchemaError";
  }
}

export function parseCsv(path: string): Table {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(path, "empty file");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, idx) => {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(path, `row ${idx + 1} has ${parts.length} fields, header has ${columns.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((c, k) => (row[c] = parts[k]));
    return row;
  });
  if (rows.length === 0) {
    throw new SchemaError(path, "no data rows");
  }
  return { path, columns, rows };
}

export function requireColumns(table: Table, needed: string[]): void {
  const missing = needed.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(table.path, `missing column(s): ${missing.join(", ")}`);
  }
}

export function num(table: Table, row: Record<string, string>, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new SchemaError(table.path, `column ${col}: non-numeric value ${JSON.stringify(row[col])}`);
  }
  return v;
}
