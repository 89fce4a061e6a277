/** Overview scene construction: pure data out, SVG elsewhere.
 *
 * Circles sit on the server's cell coordinates, colored by accuracy
 * quantile (darkest class = top 1%); selected circles get orange borders.
 * Representatives carry a doughnut ring of op ratios plus, above a zoom
 * threshold, a structure glyph connected by a leader line.
 */
import { PLACEHOLDER_COLOR, SELECTION_BORDER, accuracyColor } from "./color.js";
import { doughnutArcs } from "./glyphs.js";
export const CIRCLE_RADIUS = 0.42;
export const RING_INNER = 0.5;
export const RING_OUTER = 0.8;
export const STRUCTURE_GLYPH_MIN_ZOOM = 1.5;
export function renderOverview(view, selection, zoom = 1.0) {
    const shapes = [];
    for (const cluster of view.clusters) {
        for (const cell of cluster.cells) {
            shapes.push({
                kind: "circle",
                archId: cell.arch_id,
                clusterId: cluster.id,
                x: cell.x,
                y: cell.y,
                r: CIRCLE_RADIUS,
                fill: cell.accuracy_quantile === undefined
                    ? PLACEHOLDER_COLOR
                    : accuracyColor(cell.accuracy_quantile),
                stroke: selection.has(cell.arch_id) ? SELECTION_BORDER : null,
            });
        }
        const cellByArch = new Map(cluster.cells.map((c) => [c.arch_id, c]));
        for (const glyph of cluster.glyphs) {
            const cell = cellByArch.get(glyph.arch_id);
            if (!cell)
                continue;
            shapes.push({
                kind: "ring",
                archId: glyph.arch_id,
                x: cell.x,
                y: cell.y,
                arcs: doughnutArcs(glyph.op_ratios, RING_INNER, RING_OUTER),
            });
            if (zoom >= STRUCTURE_GLYPH_MIN_ZOOM) {
                const [lx, ly] = glyph.label_anchor;
                shapes.push({
                    kind: "leader",
                    archId: glyph.arch_id,
                    x1: cell.x,
                    y1: cell.y,
                    x2: lx,
                    y2: ly,
                });
                shapes.push({ kind: "structure", archId: glyph.arch_id, x: lx, y: ly });
            }
        }
    }
    return shapes;
}
/** Circles whose fill is the darkest class, for highlight overlays. */
export function topClassArchIds(view) {
    const out = [];
    for (const cluster of view.clusters) {
        for (const cell of cluster.cells) {
            if (cell.accuracy_quantile !== undefined && cell.accuracy_quantile >= 0.99) {
                out.push(cell.arch_id);
            }
        }
    }
    return out;
}
