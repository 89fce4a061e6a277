/**
 * End-to-end round trip against the real backend: builds a toy session,
 * serves it with the Python CLI, and drives the client logic over HTTP.
 */
import { after, before, test } from "node:test";
import assert from "node:assert/strict";
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";

import { ApiClient, LayoutView } from "../src/api.js";
import { darkestGreen } from "../src/color.js";
import { renderOverview, CircleShape } from "../src/overview.js";
import { ViewState } from "../src/state.js";

const repoRoot = path.resolve(process.cwd(), "..");
const sessionDir = mkdtempSync(path.join(tmpdir(), "archspace-ui-"));
let server: ChildProcess | null = null;
let base = "";

before(async () => {
  const build = spawnSync(
    "python3",
    [path.join(repoRoot, "scripts", "run_toy_pipeline.py"), "--session-dir", sessionDir],
    { cwd: repoRoot, encoding: "utf-8", timeout: 120_000 },
  );
  assert.equal(build.status, 0, build.stderr);

  server = spawn(
    "python3",
    ["-m", "archspace", "serve", "--port", "0", "--session-dir", sessionDir],
    { cwd: repoRoot },
  );
  const port: number = await new Promise((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => reject(new Error("server did not start")), 30_000);
    server!.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const line = buffer.split("\n").find((l) => l.includes('"serving"'));
      if (line) {
        clearTimeout(timer);
        resolve(JSON.parse(line).port as number);
      }
    });
    server!.on("error", reject);
  });
  base = `http://127.0.0.1:${port}`;
});

after(() => {
  server?.kill();
  rmSync(sessionDir, { recursive: true, force: true });
});

test("lasso over one cluster selects exactly its sampled members (server-verified)", async () => {
  const api = new ApiClient(base);
  const layout = await api.layout();
  const target = layout.clusters[0];
  const xs = target.cells.map((c) => c.x);
  const ys = target.cells.map((c) => c.y);
  const margin = 0.75;
  const polygon: [number, number][] = [
    [Math.min(...xs) - margin, Math.min(...ys) - margin],
    [Math.max(...xs) + margin, Math.min(...ys) - margin],
    [Math.max(...xs) + margin, Math.max(...ys) + margin],
    [Math.min(...xs) - margin, Math.max(...ys) + margin],
  ];
  const out = await api.select({ lasso: polygon, view: layout.node_id });
  const expected = target.cells.map((c) => c.arch_id).sort((a, b) => a - b);
  assert.deepEqual(out.selected.sort((a, b) => a - b), expected);
});

test("top-1% architectures render in the darkest green class", async () => {
  const api = new ApiClient(base);
  const layout = await api.layout();
  const shapes = renderOverview(layout, new Set());
  const circles = shapes.filter((s): s is CircleShape => s.kind === "circle");
  const byId = new Map(circles.map((c) => [c.archId, c]));
  let topSeen = 0;
  for (const cluster of layout.clusters) {
    for (const cell of cluster.cells) {
      if ((cell.accuracy_quantile ?? 0) >= 0.99) {
        topSeen += 1;
        assert.equal(byId.get(cell.arch_id)!.fill, darkestGreen());
      } else {
        assert.notEqual(byId.get(cell.arch_id)!.fill, darkestGreen());
      }
    }
  }
  assert.ok(topSeen >= 1, "the sampled top-1% set is visible");
});

test("zoom in and out restores prior selection and viewport", async () => {
  const api = new ApiClient(base);
  const space = await api.space();
  const zoomTargets = space.views.filter((v) => v !== "0");
  assert.ok(zoomTargets.length >= 1, "toy session has a zoomable cluster");

  const state = new ViewState("0");
  const selection = await api.select({ cluster: zoomTargets[0] });
  state.setSelection(selection.selected);
  state.pan(12, 7);
  state.scale(1.5);
  const savedViewport = { ...state.viewport };
  const savedSelection = [...state.selection].sort((a, b) => a - b);

  state.zoomInto(zoomTargets[0]);
  const zoomed = await api.layout(state.nodeId);
  assert.equal(zoomed.node_id, zoomTargets[0]);
  state.setSelection([]);
  await api.select({ ids: [] });

  state.zoomOut();
  await api.select({ ids: [...state.selection] }); // resync the server
  const restored = await api.layout(state.nodeId);
  assert.equal(restored.node_id, "0");
  assert.deepEqual(state.viewport, savedViewport);
  assert.deepEqual([...state.selection].sort((a, b) => a - b), savedSelection);
  const echo = await api.select({ ids: [...state.selection] });
  assert.deepEqual(echo.selected.sort((a, b) => a - b), savedSelection);
});

test("zoomed view keeps retained members on their parent cells", async () => {
  const api = new ApiClient(base);
  const root = await api.layout();
  const space = await api.space();
  const zoomId = space.views.find((v) => v !== "0");
  assert.ok(zoomId);
  const zoomed: LayoutView = await api.layout(zoomId);
  const parentSlice = root.clusters.find((c) => c.id === zoomId)!;
  const [cx, cy] = parentSlice.center;
  const parentOffsets = new Map(
    parentSlice.cells.map((c) => [c.arch_id, [c.x - cx, c.y - cy] as [number, number]]),
  );
  const zoomCells = new Map(
    zoomed.clusters.flatMap((sl) => sl.cells.map((c) => [c.arch_id, [c.x, c.y]] as const)),
  );
  for (const [archId, [px, py]] of parentOffsets) {
    const z = zoomCells.get(archId);
    assert.ok(z, `retained member ${archId} still shown`);
    assert.ok(Math.abs(z![0] - px) < 1e-9 && Math.abs(z![1] - py) < 1e-9);
  }
});
