"""Exploration session: the in-memory state the API serves.

A session binds one space to its sampled distance matrix, cluster tree,
per-navigation-target layouts, optional metrics, the current selection and
the active attribute filters.  Selection and filters compose as set
intersection, so applying them in either order yields the same ids.
All hit-testing (lasso polygons) happens here against the authoritative
layout coordinates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .clustering import ClusterTree
from .distances import DistanceMatrix
from .errors import ArchspaceError
from .layout import ViewLayout
from .metrics import MetricTable, SurrogateModel, ingest_metrics, surrogate_table
from .spaces import OpKind, SpaceSpec, arch_from_id, load_space
from .storage import load_distances, load_tree, load_views, _view_doc

METRIC_AXES = ("accuracy", "params", "flops", "train_time")
HISTOGRAM_BINS = 20


class ApiError(ArchspaceError):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class Session:
    spec: SpaceSpec
    dm: DistanceMatrix
    tree: ClusterTree
    views: dict[str, ViewLayout]
    metrics: Optional[MetricTable] = None
    traces: dict[str, dict] = field(default_factory=dict)
    selection: set[int] = field(default_factory=set)
    filters: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        self._quantiles = self.metrics.accuracy_quantiles() if self.metrics else {}
        self._sampled = set(int(a) for a in self.dm.arch_ids)

    # -- helpers -----------------------------------------------------------

    def sampled_ids(self) -> set[int]:
        return set(self._sampled)

    def _filter_pass(self, arch_id: int) -> bool:
        if not self.filters or self.metrics is None:
            return True
        row = self.metrics.rows.get(arch_id)
        if row is None:
            return False
        for attr, (lo, hi) in self.filters.items():
            if not lo <= float(row[attr]) <= hi:
                return False
        return True

    def surviving_ids(self) -> set[int]:
        return {a for a in self._sampled if self._filter_pass(a)}

    def effective_selection(self) -> set[int]:
        return self.selection & self.surviving_ids()

    # -- payloads ----------------------------------------------------------

    def space_summary(self) -> dict:
        hists = {}
        if self.metrics is not None:
            ids = sorted(self._sampled)
            for axis in METRIC_AXES:
                vals = self.metrics.column(axis, ids)
                counts, edges = np.histogram(vals, bins=HISTOGRAM_BINS)
                hists[axis] = {
                    "edges": [float(e) for e in edges],
                    "counts": [int(c) for c in counts],
                }
        doc = {
            "family": self.spec.family,
            "size": self.spec.size(),
            "sampled": len(self._sampled),
            "ops": [
                {"id": o.id, "name": o.name, "kind": o.kind.value} for o in self.spec.ops
            ],
            "histograms": hists,
            "views": sorted(self.views),
        }
        if self.spec.family == "op_slot":
            doc["slots"] = self.spec.num_slots
            doc["skeleton"] = [list(e) for e in self.spec.skeleton]
        else:
            doc["nodes"] = self.spec.num_nodes
            doc["max_edges"] = self.spec.max_edges
        return doc

    def _op_ratios(self, arch_id: int) -> dict[str, float]:
        arch = arch_from_id(self.spec, arch_id)
        ops = arch.slots if self.spec.family == "op_slot" else arch.node_ops
        active = [o for o in ops if self.spec.ops[o].kind is not OpKind.NONE]
        if not active:
            return {}
        out: dict[str, float] = {}
        for o in active:
            name = self.spec.ops[o].name
            out[name] = out.get(name, 0.0) + 1.0 / len(active)
        return {k: round(v, 6) for k, v in sorted(out.items())}

    def layout_payload(self, cluster: Optional[str] = None, level: Optional[int] = None) -> dict:
        node_id = cluster if cluster is not None else self.tree.root.id
        view = self.views.get(node_id)
        if view is None:
            raise ApiError(404, f"no layout for cluster {node_id!r}")
        if level is not None and level != view.level:
            raise ApiError(404, f"cluster {node_id!r} is at level {view.level}, not {level}")
        doc = _view_doc(view)
        for sl in doc["clusters"]:
            for cell in sl["cells"]:
                arch_id = cell["arch_id"]
                if self.metrics is not None and arch_id in self.metrics.rows:
                    cell["accuracy"] = self.metrics.accuracy(arch_id)
                    cell["accuracy_quantile"] = self._quantiles.get(arch_id)
            for glyph in sl["glyphs"]:
                glyph["op_ratios"] = self._op_ratios(glyph["arch_id"])
        doc["effective_selection"] = sorted(self.effective_selection())
        return doc

    # -- interactions --------------------------------------------------------

    def select(self, body: dict) -> dict:
        keys = {"ids", "lasso", "cluster"} & set(body)
        if len(keys) != 1:
            raise ApiError(400, "select needs exactly one of ids, lasso, cluster")
        if "ids" in body:
            ids = body["ids"]
            if not isinstance(ids, list):
                raise ApiError(400, "ids must be a list")
            unknown = [a for a in ids if int(a) not in self._sampled]
            if unknown:
                raise ApiError(404, f"unknown architecture ids {unknown[:5]}")
            picked = {int(a) for a in ids}
        elif "cluster" in body:
            node = self.tree.node_by_id(str(body["cluster"]))
            if node is None:
                raise ApiError(404, f"unknown cluster {body['cluster']!r}")
            picked = {int(self.dm.arch_ids[m]) for m in node.members}
        else:
            polygon = body["lasso"]
            view_id = body.get("view", self.tree.root.id)
            view = self.views.get(view_id)
            if view is None:
                raise ApiError(404, f"unknown view {view_id!r}")
            if (
                not isinstance(polygon, list)
                or len(polygon) < 3
                or not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in polygon)
            ):
                raise ApiError(400, "lasso must be a polygon of [x, y] points")
            picked = {
                c.arch_id
                for sl in view.clusters
                for c in sl.cells
                if _point_in_polygon(c.x, c.y, polygon)
            }
        self.selection = picked
        return {
            "selected": sorted(self.selection),
            "effective_selection": sorted(self.effective_selection()),
        }

    def filter(self, body: dict) -> dict:
        ranges = body.get("ranges", body)
        if not isinstance(ranges, dict):
            raise ApiError(400, "filter body must map attributes to [lo, hi]")
        new_filters: dict[str, tuple[float, float]] = {}
        for attr, bounds in ranges.items():
            if attr not in METRIC_AXES:
                raise ApiError(400, f"unknown attribute {attr!r}")
            if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
                raise ApiError(400, f"range for {attr!r} must be [lo, hi]")
            new_filters[attr] = (float(bounds[0]), float(bounds[1]))
        self.filters = new_filters
        surviving = sorted(self.surviving_ids())
        return {
            "surviving": surviving,
            "effective_selection": sorted(self.effective_selection()),
        }

    def compare(self, ids: list[int]) -> dict:
        if not ids:
            raise ApiError(400, "compare needs at least one id")
        rows = []
        vectors = {}
        structures = {}
        for arch_id in ids:
            arch_id = int(arch_id)
            if arch_id not in self._sampled:
                raise ApiError(404, f"unknown architecture id {arch_id}")
            row = {"arch_id": arch_id}
            if self.metrics is not None and arch_id in self.metrics.rows:
                rec = self.metrics.rows[arch_id]
                for axis in METRIC_AXES:
                    row[axis] = float(rec[axis])
                row["accuracy_quantile"] = self._quantiles.get(arch_id)
                vectors[arch_id] = [float(rec[axis]) for axis in METRIC_AXES]
            rows.append(row)
            structures[arch_id] = self.structure(arch_id)
        return {
            "rows": rows,
            "pcp": {"axes": list(METRIC_AXES), "vectors": vectors},
            "structures": structures,
        }

    def structure(self, arch_id: int) -> dict:
        """Schematic DAG for side-by-side display."""
        arch = arch_from_id(self.spec, arch_id)
        spec = self.spec
        nodes = [{"id": 0, "role": "input"}]
        for i in range(1, spec.num_nodes - 1):
            nodes.append({"id": i, "role": "hidden"})
        nodes.append({"id": spec.num_nodes - 1, "role": "output"})
        edges = []
        if spec.family == "op_slot":
            for slot, (u, v) in enumerate(spec.skeleton):
                op = spec.ops[arch.slots[slot]]
                if op.kind is OpKind.NONE:
                    continue
                edges.append(
                    {"source": u, "target": v, "slot": slot, "op": op.name, "kind": op.kind.value}
                )
        else:
            for i in range(1, spec.num_nodes - 1):
                op = spec.ops[arch.node_ops[i - 1]]
                nodes[i]["op"] = op.name
                nodes[i]["kind"] = op.kind.value
            for bit, (u, v) in enumerate(spec._pairs):
                if arch.edge_mask >> bit & 1:
                    edges.append({"source": u, "target": v})
        return {"nodes": nodes, "edges": edges, "degenerate": arch.is_degenerate}

    def search_trace(self, run: str) -> dict:
        trace = self.traces.get(run)
        if trace is None:
            raise ApiError(404, f"unknown search run {run!r}")
        return trace


def _point_in_polygon(x: float, y: float, polygon) -> bool:
    """Ray casting with on-edge points counting as inside."""
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = (x2 - x1) * (y - y1) / (y2 - y1) + x1
            if x < xi:
                inside = not inside
            elif x == xi:
                return True
    return inside


# -- session directory -----------------------------------------------------------

SPACE_FILE = "space.json"
METRICS_FILE = "metrics.csv"
SURROGATE_FILE = "surrogate.json"
DISTANCES_FILE = "distances.axdm"
TREE_FILE = "tree.json"
VIEWS_FILE = "views.json"
TRACES_DIR = "traces"


def load_session(session_dir) -> Session:
    root = Path(session_dir)
    spec = load_space(root / SPACE_FILE)
    dm = load_distances(root / DISTANCES_FILE, spec)
    tree = load_tree(root / TREE_FILE, spec)
    views = load_views(root / VIEWS_FILE, spec, dm.arch_ids)
    metrics = None
    if (root / METRICS_FILE).exists():
        metrics = ingest_metrics(root / METRICS_FILE, spec)
    elif (root / SURROGATE_FILE).exists():
        doc = json.loads((root / SURROGATE_FILE).read_text(encoding="utf-8"))
        metrics = surrogate_table(spec, SurrogateModel(seed=int(doc.get("seed", 0))))
    traces = {}
    traces_dir = root / TRACES_DIR
    if traces_dir.is_dir():
        for p in sorted(traces_dir.glob("*.json")):
            traces[p.stem] = json.loads(p.read_text(encoding="utf-8"))
    return Session(spec=spec, dm=dm, tree=tree, views=views, metrics=metrics, traces=traces)
