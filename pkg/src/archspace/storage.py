"""Persistence for distance matrices, cluster trees and layout views.

The distance cache is binary: magic "AXDM", version u16, n u32, backend u8,
cost scale u32, then the upper triangle row-major as u32 fixed point
(cost * 2**20), then a 32-byte invalidation key.  The key is derived from
the space hash, the cost-matrix hash and the sample-set hash, so editing
any input makes existing caches stale.  Tree and layout artifacts are JSON
documents carrying the same key.  Writers take an exclusive advisory lock;
readers validate structure and key before returning data.
"""
from __future__ import annotations

import contextlib
import json
import struct
from dataclasses import asdict
from hashlib import sha256
from pathlib import Path
from typing import Iterable

import numpy as np

from .clustering import ClusterNode, ClusterParams, ClusterTree
from .distances import BACKEND_TAGS, DistanceMatrix
from .errors import CorruptFile, StaleCache
from .layout import CellAssign, ClusterSlice, GlyphInfo, ViewLayout
from .spaces import SpaceSpec

MAGIC = b"AXDM"
FORMAT_VERSION = 1
COST_SCALE_BITS = 20
COST_SCALE = 1 << COST_SCALE_BITS
_HEADER = struct.Struct("<4sHIBI")

_TAG_TO_BACKEND = {v: k for k, v in BACKEND_TAGS.items()}


def sample_hash(arch_ids: Iterable[int]) -> str:
    h = sha256()
    for a in arch_ids:
        h.update(int(a).to_bytes(8, "little"))
    return h.hexdigest()


def cache_key(spec: SpaceSpec, arch_ids: Iterable[int]) -> bytes:
    h = sha256()
    h.update(spec.space_hash().encode())
    h.update(spec.cost_matrix_hash().encode())
    h.update(sample_hash(arch_ids).encode())
    return h.digest()


@contextlib.contextmanager
def _exclusive(path: Path):
    """Advisory write lock so concurrent writers serialize per file."""
    import fcntl

    lock_path = path.with_suffix(path.suffix + ".lock")
    with open(lock_path, "w") as lock:
        fcntl.flock(lock, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(lock, fcntl.LOCK_UN)


# -- distance cache ----------------------------------------------------------------


def save_distances(dm: DistanceMatrix, spec: SpaceSpec, path) -> None:
    path = Path(path)
    n = dm.n
    iu = np.triu_indices(n, 1)
    fixed = np.round(dm.values[iu] * COST_SCALE)
    if np.any(fixed < 0) or np.any(fixed > 0xFFFFFFFF):
        raise ValueError("distance outside fixed-point range")
    payload = fixed.astype("<u4").tobytes()
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, n, BACKEND_TAGS[dm.backend], COST_SCALE)
    footer = cache_key(spec, dm.arch_ids)
    with _exclusive(path):
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
            fh.write(footer)
        meta = {
            "version": FORMAT_VERSION,
            "kind": "distance_cache",
            "space_hash": spec.space_hash(),
            "cost_matrix_hash": spec.cost_matrix_hash(),
            "sample_hash": sample_hash(dm.arch_ids),
            "arch_ids": [int(a) for a in dm.arch_ids],
            "backend": dm.backend,
            "n": n,
        }
        meta_path = path.with_suffix(path.suffix + ".meta.json")
        meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def load_distances(path, spec: SpaceSpec) -> DistanceMatrix:
    """Read a cache back, verifying magic, sizes and the invalidation key
    against the current spec and the sidecar's sample list."""
    path = Path(path)
    meta_path = path.with_suffix(path.suffix + ".meta.json")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        arch_ids = [int(a) for a in meta["arch_ids"]]
    except (OSError, ValueError, KeyError) as exc:
        raise CorruptFile(f"{meta_path}: unreadable sidecar: {exc}") from exc
    blob = path.read_bytes()
    if len(blob) < _HEADER.size + 32:
        raise CorruptFile(f"{path}: truncated")
    magic, version, n, tag, scale = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CorruptFile(f"{path}: unsupported version {version}")
    if n != len(arch_ids):
        raise CorruptFile(f"{path}: n={n} disagrees with sidecar ({len(arch_ids)})")
    expected_len = _HEADER.size + 4 * (n * (n - 1) // 2) + 32
    if len(blob) != expected_len:
        raise CorruptFile(f"{path}: expected {expected_len} bytes, found {len(blob)}")
    footer = blob[-32:]
    if footer != cache_key(spec, arch_ids):
        raise StaleCache(f"{path}: cache key mismatch (space, costs or sample changed)")
    fixed = np.frombuffer(blob[_HEADER.size : -32], dtype="<u4").astype(np.float64)
    values = np.zeros((n, n), dtype=np.float64)
    iu = np.triu_indices(n, 1)
    values[iu] = fixed / scale
    values[(iu[1], iu[0])] = values[iu]
    return DistanceMatrix(values=values, arch_ids=arch_ids, backend=_TAG_TO_BACKEND[tag])


# -- cluster tree ---------------------------------------------------------------------


def _node_doc(node: ClusterNode, arch_ids) -> dict:
    return {
        "id": node.id,
        "level": node.level,
        "medoid_arch_id": int(arch_ids[node.medoid]),
        "medoid": node.medoid,
        "member_count": node.size,
        "members": list(node.members),
        "representatives": list(node.representatives),
        "stats": node.stats,
        "children": [_node_doc(c, arch_ids) for c in node.children],
    }


def _node_from_doc(doc: dict) -> ClusterNode:
    return ClusterNode(
        id=doc["id"],
        level=doc["level"],
        members=list(doc["members"]),
        medoid=doc["medoid"],
        children=[_node_from_doc(c) for c in doc["children"]],
        representatives=list(doc.get("representatives", [])),
        stats=dict(doc.get("stats", {})),
    )


def tree_to_json(tree: ClusterTree, spec: SpaceSpec) -> str:
    doc = {
        "version": FORMAT_VERSION,
        "kind": "cluster_tree",
        "space_hash": spec.space_hash(),
        "cache_key": cache_key(spec, tree.arch_ids).hex(),
        "arch_ids": [int(a) for a in tree.arch_ids],
        "params": asdict(tree.params),
        "root": _node_doc(tree.root, tree.arch_ids),
    }
    return json.dumps(doc, indent=2) + "\n"


def save_tree(tree: ClusterTree, spec: SpaceSpec, path) -> None:
    path = Path(path)
    with _exclusive(path):
        path.write_text(tree_to_json(tree, spec), encoding="utf-8")


def load_tree(path, spec: SpaceSpec) -> ClusterTree:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    if doc.get("kind") != "cluster_tree" or "root" not in doc:
        raise CorruptFile(f"{path}: not a cluster tree file")
    arch_ids = [int(a) for a in doc["arch_ids"]]
    if doc.get("cache_key") != cache_key(spec, arch_ids).hex():
        raise StaleCache(f"{path}: cache key mismatch")
    params = ClusterParams(**{**doc.get("params", {}), "k_range": tuple(doc["params"]["k_range"])})
    return ClusterTree(root=_node_from_doc(doc["root"]), arch_ids=arch_ids, params=params)


# -- layout views ----------------------------------------------------------------------


def _view_doc(view: ViewLayout) -> dict:
    return {
        "node_id": view.node_id,
        "level": view.level,
        "parent_id": view.parent_id,
        "anchor": list(view.anchor),
        "scale": view.scale,
        "clusters": [
            {
                "id": sl.node_id,
                "center": [sl.center[0], sl.center[1]],
                "objective": sl.objective,
                "cells": [
                    {"arch_id": c.arch_id, "member": c.member, "q": c.q, "r": c.r, "x": c.x, "y": c.y}
                    for c in sl.cells
                ],
                "glyphs": [
                    {
                        "arch_id": g.arch_id,
                        "member": g.member,
                        "cells": [list(c) for c in g.cells],
                        "label_anchor": list(g.label_anchor),
                    }
                    for g in sl.glyphs
                ],
            }
            for sl in view.clusters
        ],
    }


def _view_from_doc(doc: dict) -> ViewLayout:
    clusters = []
    for sl in doc["clusters"]:
        cells = [
            CellAssign(
                member=c["member"], arch_id=c["arch_id"], q=c["q"], r=c["r"], x=c["x"], y=c["y"]
            )
            for c in sl["cells"]
        ]
        glyphs = [
            GlyphInfo(
                member=g["member"],
                arch_id=g["arch_id"],
                cells=[tuple(c) for c in g["cells"]],
                label_anchor=tuple(g["label_anchor"]),
            )
            for g in sl["glyphs"]
        ]
        clusters.append(
            ClusterSlice(
                node_id=sl["id"],
                center=tuple(sl["center"]),
                cells=cells,
                glyphs=glyphs,
                objective=sl["objective"],
            )
        )
    return ViewLayout(
        node_id=doc["node_id"],
        level=doc["level"],
        anchor=tuple(doc["anchor"]),
        clusters=clusters,
        scale=doc.get("scale", 1.0),
        parent_id=doc.get("parent_id"),
    )


def views_to_json(views: dict[str, ViewLayout], spec: SpaceSpec, arch_ids) -> str:
    doc = {
        "version": FORMAT_VERSION,
        "kind": "layout_views",
        "space_hash": spec.space_hash(),
        "cache_key": cache_key(spec, arch_ids).hex(),
        "views": {node_id: _view_doc(v) for node_id, v in sorted(views.items())},
    }
    return json.dumps(doc, indent=2) + "\n"


def save_views(views: dict[str, ViewLayout], spec: SpaceSpec, arch_ids, path) -> None:
    path = Path(path)
    with _exclusive(path):
        path.write_text(views_to_json(views, spec, arch_ids), encoding="utf-8")


def load_views(path, spec: SpaceSpec, arch_ids) -> dict[str, ViewLayout]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    if doc.get("kind") != "layout_views" or "views" not in doc:
        raise CorruptFile(f"{path}: not a layout file")
    if doc.get("cache_key") != cache_key(spec, arch_ids).hex():
        raise StaleCache(f"{path}: cache key mismatch")
    return {node_id: _view_from_doc(v) for node_id, v in doc["views"].items()}
