/** Scented filter widgets: a range control per attribute, annotated with
 * that attribute's distribution histogram so the analyst can see where
 * the mass sits before brushing. */
export function makeWidget(attribute, histogram) {
    const max = Math.max(...histogram.counts, 1);
    const extent = [
        histogram.edges[0],
        histogram.edges[histogram.edges.length - 1],
    ];
    return {
        attribute,
        edges: [...histogram.edges],
        bars: histogram.counts.map((c) => c / max),
        range: [...extent],
        extent,
    };
}
export function setRange(widget, lo, hi) {
    const [emin, emax] = widget.extent;
    const clampedLo = Math.max(emin, Math.min(lo, emax));
    const clampedHi = Math.max(clampedLo, Math.min(hi, emax));
    return { ...widget, range: [clampedLo, clampedHi] };
}
export function isActive(widget) {
    return widget.range[0] > widget.extent[0] || widget.range[1] < widget.extent[1];
}
/** Payload for POST /api/filter: only the widgets narrowed by the user. */
export function toRanges(widgets) {
    const out = {};
    for (const widget of widgets) {
        if (isActive(widget)) {
            out[widget.attribute] = [...widget.range];
        }
    }
    return out;
}
