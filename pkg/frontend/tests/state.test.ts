import { test } from "node:test";
import assert from "node:assert/strict";

import { ViewState } from "../src/state.js";

test("zoom in then out restores viewport and selection", () => {
  const state = new ViewState("0");
  state.setSelection([1, 2, 3]);
  state.pan(10, -4);
  state.scale(2);
  const savedViewport = { ...state.viewport };

  state.zoomInto("0.1");
  assert.equal(state.nodeId, "0.1");
  assert.deepEqual(state.viewport, { x: 0, y: 0, k: 1 });
  state.setSelection([9]);
  state.pan(5, 5);

  const frame = state.zoomOut();
  assert.ok(frame);
  assert.equal(state.nodeId, "0");
  assert.deepEqual(state.viewport, savedViewport);
  assert.deepEqual([...state.selection].sort(), [1, 2, 3]);
});

test("zoom out at the root is a no-op", () => {
  const state = new ViewState("0");
  assert.equal(state.zoomOut(), null);
  assert.equal(state.nodeId, "0");
});

test("nested zooms unwind in order", () => {
  const state = new ViewState("0");
  state.zoomInto("0.2");
  state.zoomInto("0.2.1");
  assert.equal(state.depth, 2);
  state.zoomOut();
  assert.equal(state.nodeId, "0.2");
  state.zoomOut();
  assert.equal(state.nodeId, "0");
});

test("stale responses are discarded", () => {
  const state = new ViewState("0");
  const first = state.beginRequest();
  const second = state.beginRequest();
  assert.equal(state.acceptResponse(first), false);
  assert.equal(state.acceptResponse(second), true);
});

test("filters and comparison are plain copies", () => {
  const state = new ViewState("0");
  const ranges: Record<string, [number, number]> = { accuracy: [0.5, 1.0] };
  state.setFilters(ranges);
  ranges.accuracy = [0, 0];
  assert.deepEqual(state.filters.accuracy, [0.5, 1.0]);
  const ids = [4, 5];
  state.setComparison(ids);
  ids.push(6);
  assert.deepEqual(state.comparison, [4, 5]);
});
