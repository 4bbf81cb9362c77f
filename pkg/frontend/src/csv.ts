/**
 * Reader for the integrator's trajectory CSV format: one header line of
 * column names, numeric data rows, and `#` comment lines anywhere.
 */

export class InputError extends Error {}

export interface Table {
  readonly file: string;
  readonly columns: string[];
  /** column name → values, one per data row */
  readonly data: Map<string, number[]>;
  readonly rows: number;
}

export function parseCsv(file: string, text: string): Table {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0 && !l.startsWith("#"));
  if (lines.length === 0) {
    throw new InputError(`input ${file} is empty`);
  }
  const columns = (lines[0] as string).split(",").map((c) => c.trim());
  if (new Set(columns).size !== columns.length) {
    throw new InputError(`input ${file} repeats a column name in its header`);
  }
  const body = lines.slice(1);
  if (body.length === 0) {
    throw new InputError(`input ${file} has no data rows (header only)`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  body.forEach((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new InputError(
        `input ${file} row ${i + 1} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    cells.forEach((cell, j) => {
      const value = Number(cell);
      if (!Number.isFinite(value) && cell.trim().toLowerCase() !== "nan") {
        throw new InputError(
          `input ${file} row ${i + 1} column '${columns[j]}' is not numeric: '${cell}'`,
        );
      }
      (data.get(columns[j] as string) as number[]).push(value);
    });
  });
  return { file, columns, data, rows: body.length };
}

/** Fetch a column, failing with the offending name and the available set. */
export function column(table: Table, name: string): number[] {
  const values = table.data.get(name);
  if (values === undefined) {
    throw new InputError(
      `input ${table.file} has no column '${name}' (columns: ${table.columns.join(", ")})`,
    );
  }
  return values;
}

export function hasColumn(table: Table, name: string): boolean {
  return table.data.has(name);
}
