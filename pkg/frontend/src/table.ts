/** Comparison table: each metric cell shows the value and a bar scaled to
 * the column maximum; rows sort by any metric column. */

import type { CompareRow } from "./api.js";

export interface TableCell {
  value: number | null;
  bar: number; // 0..1 fraction of the column max
}

export interface TableRow {
  archId: number;
  cells: Record<string, TableCell>;
}

export const TABLE_COLUMNS = ["accuracy", "params", "flops", "train_time"] as const;
export type TableColumn = (typeof TABLE_COLUMNS)[number];

export function buildTable(
  rows: CompareRow[],
  sortBy: TableColumn = "accuracy",
  descending = true,
): TableRow[] {
  const maxima: Record<string, number> = {};
  for (const column of TABLE_COLUMNS) {
    maxima[column] = Math.max(
      ...rows.map((r) => Math.abs((r[column] as number | undefined) ?? 0)),
      0,
    );
  }
  const built = rows.map((row) => {
    const cells: Record<string, TableCell> = {};
    for (const column of TABLE_COLUMNS) {
      const raw = row[column] as number | undefined;
      cells[column] = {
        value: raw ?? null,
        bar: raw === undefined || maxima[column] === 0 ? 0 : Math.abs(raw) / maxima[column],
      };
    }
    return { archId: row.arch_id, cells };
  });
  built.sort((a, b) => {
    const av = a.cells[sortBy].value ?? -Infinity;
    const bv = b.cells[sortBy].value ?? -Infinity;
    return descending ? bv - av : av - bv;
  });
  return built;
}
