import { test } from "node:test";
import assert from "node:assert/strict";

import { arcPath, doughnutArcs, layoutStructure } from "../src/glyphs.js";
import type { Structure } from "../src/api.js";

test("equal ratios produce equal sweeps", () => {
  const arcs = doughnutArcs({ conv3x3: 0.5, identity: 0.5 }, 0.5, 0.8);
  assert.equal(arcs.length, 2);
  const sweep0 = arcs[0].endAngle - arcs[0].startAngle;
  const sweep1 = arcs[1].endAngle - arcs[1].startAngle;
  assert.ok(Math.abs(sweep0 - sweep1) < 1e-12);
  assert.ok(Math.abs(sweep0 - Math.PI) < 1e-12);
});

test("arcs cover the full circle in op-name order", () => {
  const arcs = doughnutArcs({ identity: 0.25, conv3x3: 0.5, none: 0.25 }, 0.5, 0.8);
  assert.deepEqual(
    arcs.map((a) => a.op),
    ["conv3x3", "identity", "none"],
  );
  const total = arcs.reduce((acc, a) => acc + (a.endAngle - a.startAngle), 0);
  assert.ok(Math.abs(total - 2 * Math.PI) < 1e-12);
  for (let i = 1; i < arcs.length; i++) {
    assert.ok(Math.abs(arcs[i].startAngle - arcs[i - 1].endAngle) < 1e-12);
  }
});

test("empty ratios produce no arcs", () => {
  assert.deepEqual(doughnutArcs({}, 0.5, 0.8), []);
});

test("arc path is a closed annular sector", () => {
  const [arc] = doughnutArcs({ conv3x3: 1.0 }, 0.5, 0.8).slice(0, 1);
  const d = arcPath({ ...arc, endAngle: arc.startAngle + Math.PI / 2 }, 0, 0);
  assert.match(d, /^M .* Z$/);
  assert.equal((d.match(/A /g) ?? []).length, 2);
});

test("structure layout orders nodes left to right with skip edges lifted", () => {
  const structure: Structure = {
    nodes: [
      { id: 0, role: "input" },
      { id: 1, role: "hidden" },
      { id: 2, role: "output" },
    ],
    edges: [
      { source: 0, target: 1, op: "conv3x3" },
      { source: 1, target: 2, op: "conv3x3" },
      { source: 0, target: 2, op: "identity" },
    ],
    degenerate: false,
  };
  const layout = layoutStructure(structure, 120, 60);
  assert.equal(layout.nodes.length, 3);
  assert.ok(layout.nodes[0].x < layout.nodes[1].x);
  assert.ok(layout.nodes[1].x < layout.nodes[2].x);
  const skip = layout.edges[2];
  assert.ok(skip.y1 < layout.nodes[0].y); // lifted above the spine
});
