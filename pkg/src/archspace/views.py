"""Navigable view construction: one layout per navigation target.

The root view shows the top-level clusters as separate discs (stress layout
of medoid distances, hex-packed members inside each).  Zooming into a
cluster produces a finer view of the same disc: the grid grows outward,
every member retained from the parent view keeps its exact cell (so the
cyclic angular order around the disc center is untouched), newly sampled
members fill the remaining cells, and the cluster's children provide the
next round of representatives and the sub-group tint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clustering import ClusterNode, ClusterTree, sample_partition
from .layout import (
    CellAssign,
    ClusterSlice,
    GlyphInfo,
    HexGrid,
    LayoutParams,
    Placement,
    ViewLayout,
    greedy_assign,
    hex_grid,
    layout_objective,
    place_labels,
    separate_centers,
    stress_layout_clusters,
    swap_refine,
)
from .metrics import MetricTable


def _accuracy_vector(dm, metrics: Optional[MetricTable]) -> Optional[np.ndarray]:
    if metrics is None:
        return None
    return np.array([metrics.rows[a]["accuracy"] for a in dm.arch_ids])


def _order_reps(reps, accuracy) -> list[int]:
    if accuracy is None:
        return list(reps)
    return sorted(reps, key=lambda m: (-accuracy[m], m))


def _restricted_objective(placement: Placement, dm_values, members: set[int]) -> float:
    occupant = placement.occupant_map()
    total = 0.0
    for member, pos in placement.cell_of.items():
        if member not in members:
            continue
        for adj in placement.grid.neighbors(pos):
            other = occupant.get(adj)
            if other is not None and other in members:
                total += dm_values[member, other]
    return float(total)


def _slice_from_placement(
    node: ClusterNode,
    placement: Placement,
    dm,
    center: tuple[float, float],
    members: Optional[set[int]] = None,
) -> ClusterSlice:
    grid = placement.grid
    wanted = members if members is not None else set(placement.cell_of)
    cells = []
    for member, pos in sorted(placement.cell_of.items()):
        if member not in wanted:
            continue
        q, r = grid.cells[pos]
        x, y = grid.xy[pos]
        cells.append(
            CellAssign(
                member=member,
                arch_id=int(dm.arch_ids[member]),
                q=q,
                r=r,
                x=center[0] + x,
                y=center[1] + y,
            )
        )
    rep_members = [m for m in placement.reserved if m in wanted]
    rep_xy = [grid.xy[placement.cell_of[m]] for m in rep_members]
    anchors = place_labels(rep_xy, disc_radius=grid.radius)
    glyphs = []
    for m, anchor in zip(rep_members, anchors):
        block = [grid.cells[pos] for pos in placement.reserved[m]]
        glyphs.append(
            GlyphInfo(
                member=m,
                arch_id=int(dm.arch_ids[m]),
                cells=block,
                label_anchor=(center[0] + anchor[0], center[1] + anchor[1]),
            )
        )
    if members is None:
        objective = layout_objective(placement, dm.values)
    else:
        objective = _restricted_objective(placement, dm.values, wanted)
    return ClusterSlice(
        node_id=node.id, center=center, cells=cells, glyphs=glyphs, objective=objective
    )


def _build_disc(
    node: ClusterNode, display: list[int], reps: list[int], dm, params: LayoutParams
) -> Placement:
    grid = hex_grid(len(display), reserved_reps=len(reps))
    placement = greedy_assign(display, dm.values, grid, representatives=reps)
    return swap_refine(placement, dm.values, max_passes=params.swap_passes)


def _clamped_budget(requested: int, clusters, total: int, floor: int = 10) -> int:
    return max(min(requested, total), floor * len(clusters))


def build_root_view(tree: ClusterTree, dm, metrics, params: LayoutParams) -> ViewLayout:
    accuracy = _accuracy_vector(dm, metrics)
    children = tree.root.children or [tree.root]
    budget = _clamped_budget(params.view_budget, children, tree.root.size)
    picks, _ = sample_partition(children, dm, budget)

    placements: dict[str, Placement] = {}
    for child in children:
        reps = _order_reps(child.representatives, accuracy)
        display = sorted(set(picks[child.id]) | set(reps))
        placements[child.id] = _build_disc(child, display, reps, dm, params)

    if len(children) == 1:
        centers = np.zeros((1, 2))
    else:
        medoids = [c.medoid for c in children]
        cluster_dm = dm.values[np.ix_(medoids, medoids)]
        centers, _ = stress_layout_clusters(
            cluster_dm, iterations=params.stress_iterations, seed=params.seed
        )
        radii = [placements[c.id].grid.radius + params.label_radius * 2 for c in children]
        scale = max(1.0, 2.0 * max(radii) / max(np.abs(centers).max(), 1.0))
        centers = separate_centers(centers * scale, radii)

    slices = [
        _slice_from_placement(child, placements[child.id], dm, tuple(centers[i]))
        for i, child in enumerate(children)
    ]
    return ViewLayout(
        node_id=tree.root.id, level=0, anchor=(0.0, 0.0), clusters=slices, parent_id=None
    )


def _zoom_grid(total: int, reps: int, retained_cells: list[tuple[int, int]]) -> HexGrid:
    size = max(total + 6 * reps, 1)
    grid = hex_grid(size)
    while any(cell not in grid.position for cell in retained_cells):
        size += 6
        grid = hex_grid(size)
    return grid


def _reserve_zoom_glyphs(
    grid: HexGrid, reps: list[int], cell_of: dict[int, int], taken: set[int]
) -> dict[int, list[int]]:
    """Glyph blocks for zoomed views: a representative keeps its own cell
    and reserves whichever of its six neighbors are still free."""
    blocks: dict[int, list[int]] = {}
    reserved: set[int] = set()
    for rep in reps:
        pos = cell_of.get(rep)
        if pos is None:
            for cand in range(len(grid)):
                if cand in taken or cand in reserved:
                    continue
                block_ok = grid.full_neighborhood(cand) and all(
                    b not in taken and b not in reserved for b in grid.neighbors(cand)
                )
                if block_ok:
                    pos = cand
                    break
            if pos is None:
                for cand in range(len(grid)):
                    if cand not in taken and cand not in reserved:
                        pos = cand
                        break
            cell_of[rep] = pos
            taken.add(pos)
        ring = [
            b
            for b in grid.neighbors(pos)
            if b not in taken and b not in reserved
        ]
        blocks[rep] = [pos] + ring
        reserved.update(ring)
    return blocks


def build_zoom_view(
    node: ClusterNode,
    parent_view: ViewLayout,
    tree: ClusterTree,
    dm,
    metrics,
    params: LayoutParams,
) -> ViewLayout:
    accuracy = _accuracy_vector(dm, metrics)
    parent_slice = next(s for s in parent_view.clusters if s.node_id == node.id)
    retained = {c.member: (c.q, c.r) for c in parent_slice.cells}

    children = node.children or [node]
    budget = _clamped_budget(params.zoom_budget, children, node.size)
    picks, _ = sample_partition(children, dm, budget)
    reps: list[int] = []
    for child in children:
        reps.extend(_order_reps(child.representatives, accuracy))
    display = sorted(set(retained) | set(reps) | {m for p in picks.values() for m in p})

    grid = _zoom_grid(len(display), len(reps), list(retained.values()))
    cell_of: dict[int, int] = {m: grid.position[cell] for m, cell in retained.items()}
    taken = set(cell_of.values())
    blocks = _reserve_zoom_glyphs(grid, reps, cell_of, taken)
    reserved = {pos for block in blocks.values() for pos in block[1:]}

    occupant = {pos: m for m, pos in cell_of.items()}
    remaining = [m for m in display if m not in cell_of]
    for pos in range(len(grid)):
        if not remaining:
            break
        if pos in taken or pos in reserved:
            continue
        adjacent = [occupant[a] for a in grid.neighbors(pos) if a in occupant]
        best_m, best_cost = None, math.inf
        for m in remaining:
            cost = sum(dm.values[m, o] for o in adjacent)
            if cost < best_cost:
                best_m, best_cost = m, cost
        cell_of[best_m] = pos
        occupant[pos] = best_m
        taken.add(pos)
        remaining.remove(best_m)

    placement = Placement(grid=grid, cell_of=cell_of, reserved=blocks)
    placement = swap_refine(
        placement, dm.values, max_passes=params.swap_passes, frozen=set(retained)
    )

    slices = []
    for child in children:
        members = set(child.members) & set(placement.cell_of)
        if not members:
            continue
        xs = [placement.grid.xy[placement.cell_of[m]] for m in members]
        center = (
            float(np.mean([p[0] for p in xs])),
            float(np.mean([p[1] for p in xs])),
        )
        child_slice = _slice_from_placement(child, placement, dm, (0.0, 0.0), members)
        child_slice.center = center
        slices.append(child_slice)
    return ViewLayout(
        node_id=node.id,
        level=node.level,
        anchor=(0.0, 0.0),
        clusters=slices,
        parent_id=parent_view.node_id,
    )


def build_views(tree: ClusterTree, dm, metrics=None, params: LayoutParams = LayoutParams()) -> dict[str, ViewLayout]:
    """One layout per navigation target: the root plus every internal node."""
    views: dict[str, ViewLayout] = {}
    root_view = build_root_view(tree, dm, metrics, params)
    views[tree.root.id] = root_view

    def descend(node: ClusterNode, parent_view: ViewLayout) -> None:
        for child in node.children:
            if child.is_leaf():
                continue
            view = build_zoom_view(child, parent_view, tree, dm, metrics, params)
            views[child.id] = view
            descend(child, view)

    descend(tree.root, root_view)
    return views
