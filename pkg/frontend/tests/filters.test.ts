import { test } from "node:test";
import assert from "node:assert/strict";

import { isActive, makeWidget, setRange, toRanges } from "../src/filters.js";

const histogram = { edges: [0, 0.25, 0.5, 0.75, 1.0], counts: [2, 8, 4, 2] };

test("widget starts at the full extent with normalized bars", () => {
  const widget = makeWidget("accuracy", histogram);
  assert.deepEqual(widget.range, [0, 1.0]);
  assert.deepEqual(widget.extent, [0, 1.0]);
  assert.equal(Math.max(...widget.bars), 1);
  assert.equal(widget.bars[1], 1);
  assert.equal(widget.bars[0], 0.25);
  assert.ok(!isActive(widget));
});

test("setRange clamps to the extent and keeps lo <= hi", () => {
  const widget = makeWidget("accuracy", histogram);
  const narrowed = setRange(widget, 0.4, 2.0);
  assert.deepEqual(narrowed.range, [0.4, 1.0]);
  assert.ok(isActive(narrowed));
  const crossed = setRange(widget, 0.8, 0.2);
  assert.ok(crossed.range[0] <= crossed.range[1]);
});

test("only narrowed widgets contribute to the filter payload", () => {
  const a = setRange(makeWidget("accuracy", histogram), 0.5, 1.0);
  const b = makeWidget("params", histogram);
  assert.deepEqual(toRanges([a, b]), { accuracy: [0.5, 1.0] });
  assert.deepEqual(toRanges([b]), {});
});
