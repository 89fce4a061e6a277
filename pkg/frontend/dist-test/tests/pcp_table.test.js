import { test } from "node:test";
import assert from "node:assert/strict";
import { axisScales, brushedIds, composeWithFilters, polylines } from "../src/pcp.js";
import { buildTable } from "../src/table.js";
const data = {
    axes: ["accuracy", "params", "flops", "train_time"],
    vectors: {
        "1": [0.9, 100, 5, 1.0],
        "2": [0.8, 300, 9, 2.0],
        "3": [0.7, 200, 1, 3.0],
    },
};
test("polylines normalize each axis to [0, 1]", () => {
    const lines = polylines(data);
    assert.equal(lines.length, 3);
    for (const line of lines) {
        for (const [, t] of line.points) {
            assert.ok(t >= 0 && t <= 1);
        }
    }
    const scales = axisScales(data);
    assert.equal(scales[0].min, 0.7);
    assert.equal(scales[0].max, 0.9);
    const byId = new Map(lines.map((l) => [l.archId, l]));
    assert.equal(byId.get(1).points[0][1], 1); // max accuracy at the top
    assert.equal(byId.get(3).points[0][1], 0);
});
test("brushes select by raw value and compose by intersection", () => {
    const brushed = brushedIds(data, { accuracy: [0.75, 1.0] });
    assert.deepEqual(brushed.sort(), [1, 2]);
    const both = brushedIds(data, { accuracy: [0.75, 1.0], params: [0, 150] });
    assert.deepEqual(both, [1]);
    // composing with the scented-widget survivors is an intersection
    assert.deepEqual(composeWithFilters(brushed, [2, 3]), [2]);
    assert.deepEqual(composeWithFilters([], [1, 2, 3]), []);
});
test("brush on an unknown axis is ignored", () => {
    assert.deepEqual(brushedIds(data, { latency: [0, 1] }).sort(), [1, 2, 3]);
});
const rows = [
    { arch_id: 1, accuracy: 0.9, params: 100, flops: 5, train_time: 1 },
    { arch_id: 2, accuracy: 0.8, params: 300, flops: 9, train_time: 2 },
    { arch_id: 3, accuracy: 0.95, params: 200, flops: 1, train_time: 3 },
];
test("table sorts by accuracy descending by default", () => {
    const table = buildTable(rows);
    assert.deepEqual(table.map((r) => r.archId), [3, 1, 2]);
});
test("table bars scale to the column maximum", () => {
    const table = buildTable(rows, "params", false);
    assert.deepEqual(table.map((r) => r.archId), [1, 3, 2]);
    const barByArch = new Map(table.map((r) => [r.archId, r.cells.params.bar]));
    assert.equal(barByArch.get(2), 1.0);
    assert.ok(Math.abs(barByArch.get(1) - 100 / 300) < 1e-12);
});
test("missing metric renders empty cell with zero bar", () => {
    const table = buildTable([{ arch_id: 7 }]);
    assert.equal(table[0].cells.accuracy.value, null);
    assert.equal(table[0].cells.accuracy.bar, 0);
});
