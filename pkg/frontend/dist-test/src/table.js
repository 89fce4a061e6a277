/** Comparison table: each metric cell shows the value and a bar scaled to
 * the column maximum; rows sort by any metric column. */
export const TABLE_COLUMNS = ["accuracy", "params", "flops", "train_time"];
export function buildTable(rows, sortBy = "accuracy", descending = true) {
    const maxima = {};
    for (const column of TABLE_COLUMNS) {
        maxima[column] = Math.max(...rows.map((r) => Math.abs(r[column] ?? 0)), 0);
    }
    const built = rows.map((row) => {
        const cells = {};
        for (const column of TABLE_COLUMNS) {
            const raw = row[column];
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
