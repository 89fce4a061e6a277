/** Scented filter widgets: a range control per attribute, annotated with
 * that attribute's distribution histogram so the analyst can see where
 * the mass sits before brushing. */

import type { Histogram } from "./api.js";

export interface ScentedWidget {
  attribute: string;
  edges: number[];
  bars: number[]; // counts normalized to [0, 1]
  range: [number, number];
  extent: [number, number];
}

export function makeWidget(attribute: string, histogram: Histogram): ScentedWidget {
  const max = Math.max(...histogram.counts, 1);
  const extent: [number, number] = [
    histogram.edges[0],
    histogram.edges[histogram.edges.length - 1],
  ];
  return {
    attribute,
    edges: [...histogram.edges],
    bars: histogram.counts.map((c) => c / max),
    range: [...extent] as [number, number],
    extent,
  };
}

export function setRange(widget: ScentedWidget, lo: number, hi: number): ScentedWidget {
  const [emin, emax] = widget.extent;
  const clampedLo = Math.max(emin, Math.min(lo, emax));
  const clampedHi = Math.max(clampedLo, Math.min(hi, emax));
  return { ...widget, range: [clampedLo, clampedHi] };
}

export function isActive(widget: ScentedWidget): boolean {
  return widget.range[0] > widget.extent[0] || widget.range[1] < widget.extent[1];
}

/** Payload for POST /api/filter: only the widgets narrowed by the user. */
export function toRanges(widgets: ScentedWidget[]): Record<string, [number, number]> {
  const out: Record<string, [number, number]> = {};
  for (const widget of widgets) {
    if (isActive(widget)) {
      out[widget.attribute] = [...widget.range] as [number, number];
    }
  }
  return out;
}
