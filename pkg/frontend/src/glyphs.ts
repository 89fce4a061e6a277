/** Summary-glyph doughnuts and schematic structure glyphs. */

import type { Structure } from "./api.js";

export interface Arc {
  op: string;
  startAngle: number;
  endAngle: number;
  innerRadius: number;
  outerRadius: number;
}

export const OP_COLORS: Record<string, string> = {
  conv3x3: "#1f77b4",
  conv1x1: "#6baed6",
  maxpool3x3: "#d62728",
  avgpool3x3: "#e377c2",
  identity: "#7f7f7f",
  none: "#d9d9d9",
};

export function opColor(name: string): string {
  return OP_COLORS[name] ?? "#bcbd22";
}

/** One arc per op, sweep proportional to its ratio, stable op order. */
export function doughnutArcs(
  opRatios: Record<string, number>,
  innerRadius: number,
  outerRadius: number,
): Arc[] {
  const entries = Object.entries(opRatios).sort(([a], [b]) => (a < b ? -1 : 1));
  const total = entries.reduce((acc, [, v]) => acc + v, 0);
  if (total <= 0) return [];
  const arcs: Arc[] = [];
  let angle = -Math.PI / 2;
  for (const [op, ratio] of entries) {
    const sweep = (ratio / total) * 2 * Math.PI;
    arcs.push({
      op,
      startAngle: angle,
      endAngle: angle + sweep,
      innerRadius,
      outerRadius,
    });
    angle += sweep;
  }
  return arcs;
}

export function arcPath(arc: Arc, cx: number, cy: number): string {
  const { startAngle: a0, endAngle: a1, innerRadius: r0, outerRadius: r1 } = arc;
  const large = a1 - a0 > Math.PI ? 1 : 0;
  const p = (r: number, a: number) => `${cx + r * Math.cos(a)} ${cy + r * Math.sin(a)}`;
  return [
    `M ${p(r1, a0)}`,
    `A ${r1} ${r1} 0 ${large} 1 ${p(r1, a1)}`,
    `L ${p(r0, a1)}`,
    `A ${r0} ${r0} 0 ${large} 0 ${p(r0, a0)}`,
    "Z",
  ].join(" ");
}

export interface StructureLayout {
  nodes: { id: number; x: number; y: number; role: string; label?: string }[];
  edges: { x1: number; y1: number; x2: number; y2: number; label?: string; color: string }[];
  width: number;
  height: number;
}

/** Left-to-right schematic of the DAG: node index is the layer order. */
export function layoutStructure(structure: Structure, width = 120, height = 60): StructureLayout {
  const n = structure.nodes.length;
  const stepX = n > 1 ? width / (n - 1) : 0;
  const midY = height / 2;
  const nodes = structure.nodes.map((node, i) => ({
    id: node.id,
    x: i * stepX,
    y: midY,
    role: node.role,
    label: node.op,
  }));
  const byId = new Map(nodes.map((p) => [p.id, p]));
  const edges = structure.edges.map((edge) => {
    const a = byId.get(edge.source)!;
    const b = byId.get(edge.target)!;
    const skip = edge.target - edge.source > 1;
    return {
      x1: a.x,
      y1: skip ? midY - (edge.target - edge.source) * 8 : midY,
      x2: b.x,
      y2: skip ? midY - (edge.target - edge.source) * 8 : midY,
      label: edge.op,
      color: edge.op ? opColor(edge.op) : "#555555",
    };
  });
  return { nodes, edges, width, height };
}
