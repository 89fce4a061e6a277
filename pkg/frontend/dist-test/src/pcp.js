/** Parallel coordinates: one axis per attribute, one polyline per
 * architecture, brushable per axis.  Brushes compose with the scented
 * filter ranges by intersection over ids. */
export function axisScales(data) {
    return data.axes.map((axis, i) => {
        const values = Object.values(data.vectors).map((v) => v[i]);
        return {
            axis,
            min: values.length ? Math.min(...values) : 0,
            max: values.length ? Math.max(...values) : 1,
        };
    });
}
export function polylines(data) {
    const scales = axisScales(data);
    return Object.entries(data.vectors).map(([id, vector]) => ({
        archId: Number(id),
        points: vector.map((value, i) => {
            const { min, max } = scales[i];
            const t = max > min ? (value - min) / (max - min) : 0.5;
            return [i, t];
        }),
    }));
}
/** Ids whose raw values fall inside every active brush. */
export function brushedIds(data, brushes) {
    const axisIndex = new Map(data.axes.map((a, i) => [a, i]));
    const out = [];
    for (const [id, vector] of Object.entries(data.vectors)) {
        let keep = true;
        for (const [axis, [lo, hi]] of Object.entries(brushes)) {
            const i = axisIndex.get(axis);
            if (i === undefined)
                continue;
            if (vector[i] < lo || vector[i] > hi) {
                keep = false;
                break;
            }
        }
        if (keep)
            out.push(Number(id));
    }
    return out;
}
/** Brushes restrict the server-side filter survivors further. */
export function composeWithFilters(brushed, surviving) {
    const alive = new Set(surviving);
    return brushed.filter((id) => alive.has(id));
}
