/** Minimal numeric-CSV reader for the analysis outputs. */

export interface NumericTable {
  columns: string[];
  rows: number[][];
}

export class CsvError extends Error {}

export function parseNumericCsv(text: string, required: string[]): NumericTable {
  const lines = text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty csv");
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  for (const name of required) {
    if (!columns.includes(name)) {
      throw new CsvError(`missing column '${name}' (found: ${columns.join(",")})`);
    }
  }
  if (lines.length === 1) {
    throw new CsvError("csv has a header but no data rows");
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",").map((cell) => Number(cell));
    if (cells.length !== columns.length || cells.some((v) => Number.isNaN(v))) {
      throw new CsvError(`line ${i + 1}: expected ${columns.length} numeric cells`);
    }
    rows.push(cells);
  }
  return { columns, rows };
}

export function column(table: NumericTable, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`missing column '${name}'`);
  }
  return table.rows.map((row) => row[idx]);
}
