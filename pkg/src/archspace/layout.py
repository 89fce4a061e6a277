"""Hexagonal-grid layout of architectures inside cluster discs.

Cluster centers come from a stress layout over the cluster distance matrix
(SMACOF majorization, monotone by construction).  Within a cluster, members
are assigned to hexagonal grid cells to minimize the summed distance between
grid-adjacent pairs, a quadratic assignment objective handled greedily plus
best-improvement swap refinement.  Representative architectures reserve a
seven-cell block (their cell and its six neighbors) for the summary glyph.

Zoomed views grow the same grid outward and keep every retained member on
its previous cell, which preserves the cyclic angular order around the disc
center exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GridOverflow

AXIAL_DIRECTIONS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))
SQRT3 = math.sqrt(3.0)


def axial_to_xy(q: int, r: int) -> tuple[float, float]:
    return (q + r / 2.0, r * SQRT3 / 2.0)


@dataclass
class LayoutParams:
    stress_iterations: int = 300
    swap_passes: int = 50
    view_budget: int = 150
    zoom_budget: int = 150
    label_radius: float = 1.6
    rep_range: tuple[int, int] = (2, 5)
    seed: int = 0


class HexGrid:
    """Unit-spacing hexagonal cells, spiral-ordered from the center out."""

    def __init__(self, cells: Sequence[tuple[int, int]]):
        self.cells = list(cells)
        self.position = {c: i for i, c in enumerate(self.cells)}
        self.xy = [axial_to_xy(q, r) for q, r in self.cells]
        self._neighbors: list[list[int]] = []
        for q, r in self.cells:
            adj = []
            for dq, dr in AXIAL_DIRECTIONS:
                pos = self.position.get((q + dq, r + dr))
                if pos is not None:
                    adj.append(pos)
            self._neighbors.append(adj)

    def __len__(self) -> int:
        return len(self.cells)

    def neighbors(self, pos: int) -> list[int]:
        return self._neighbors[pos]

    def full_neighborhood(self, pos: int) -> bool:
        return len(self._neighbors[pos]) == 6

    @property
    def radius(self) -> float:
        return max(math.hypot(x, y) for x, y in self.xy) + 0.5


def _sort_key(cell):
    x, y = axial_to_xy(*cell)
    return (round(math.hypot(x, y), 9), math.atan2(y, x) % (2 * math.pi))


def _ring(k: int) -> list[tuple[int, int]]:
    out = []
    q, r = k, 0
    for dq, dr in ((-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)):
        for _ in range(k):
            out.append((q, r))
            q, r = q + dq, r + dr
    return out


def _spiral_cells(count: int) -> list[tuple[int, int]]:
    """The `count` nearest lattice cells to the origin in canonical order.

    Rings are generated past the cutoff until no unseen ring can contain a
    nearer cell, so any shorter spiral is a strict prefix of a longer one
    (grids grown for zoomed views contain their parent grid exactly).
    """
    cells = [(0, 0)]
    ring = 1
    while len(cells) < count:
        cells.extend(_ring(ring))
        ring += 1
    cells.sort(key=_sort_key)
    # a farther ring's nearest cell sits at ring * sqrt(3)/2 from the origin
    while ring * SQRT3 / 2 <= _sort_key(cells[count - 1])[0] + 1e-9:
        cells.extend(_ring(ring))
        ring += 1
        cells.sort(key=_sort_key)
    return cells


def hex_grid(n_members: int, reserved_reps: int = 0, exact: Optional[int] = None) -> HexGrid:
    """Grid with one cell per member plus six extra per glyph block, taken
    nearest-first from the spiral."""
    needed = exact if exact is not None else max(1, n_members + 6 * reserved_reps)
    if needed == 1:
        return HexGrid([(0, 0)])
    return HexGrid(_spiral_cells(needed)[:needed])


# -- stress layout of cluster centers ------------------------------------------


def stress_layout_clusters(
    cluster_dm: np.ndarray,
    iterations: int = 300,
    seed: int = 0,
) -> tuple[np.ndarray, list[float]]:
    """2-D positions whose distances approximate cluster distances.

    Majorization updates guarantee the weighted stress
    sum (|p_i-p_j| - d_ij)^2 / d_ij^2 never increases; the trace of
    per-iteration stress values is returned alongside the positions,
    which are rescaled so the mean pairwise distance matches the data.
    """
    d = np.asarray(cluster_dm, dtype=np.float64)
    K = d.shape[0]
    if K == 1:
        return np.zeros((1, 2)), [0.0]
    if not np.allclose(d, d.T) or np.any(np.diag(d) != 0):
        raise ValueError("cluster distances must be symmetric with zero diagonal")
    eps = max(d.max(), 1.0) * 1e-9
    dm = np.where(d > 0, d, eps)
    np.fill_diagonal(dm, 1.0)  # never used on the diagonal
    w = 1.0 / dm**2
    np.fill_diagonal(w, 0.0)

    rng = np.random.default_rng(seed)
    angles = 2 * math.pi * (np.arange(K) / K) + rng.uniform(0, 2 * math.pi)
    radius = float(d[d > 0].mean()) / 2 if np.any(d > 0) else 1.0
    pos = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])

    def stress(p):
        diff = p[:, None, :] - p[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        return float((w * (dist - d) ** 2).sum() / 2)

    trace = [stress(pos)]
    V = np.diag(w.sum(axis=1)) - w
    V_pinv = np.linalg.pinv(V)
    for _ in range(iterations):
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        np.fill_diagonal(dist, 1.0)
        ratio = w * d / np.maximum(dist, 1e-12)
        np.fill_diagonal(ratio, 0.0)
        B = -ratio
        np.fill_diagonal(B, ratio.sum(axis=1))
        pos = V_pinv @ (B @ pos)  # Guttman transform, stress-monotone
        trace.append(stress(pos))
        if trace[-2] - trace[-1] < 1e-12 * max(trace[0], 1.0):
            break

    realized = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    mean_real = realized[np.triu_indices(K, 1)].mean()
    mean_target = d[np.triu_indices(K, 1)].mean()
    if mean_real > 0 and mean_target > 0:
        pos = pos * (mean_target / mean_real)
    return pos, trace


def separate_centers(
    positions: np.ndarray, radii: Sequence[float], padding: float = 1.0, max_iter: int = 200
) -> np.ndarray:
    """Push cluster discs apart until none overlap (an extrapolation: the
    source layout does not define disc/spacing interaction)."""
    pos = positions.astype(np.float64).copy()
    K = len(pos)
    for _ in range(max_iter):
        moved = False
        for i in range(K):
            for j in range(i + 1, K):
                delta = pos[j] - pos[i]
                dist = float(np.linalg.norm(delta))
                need = radii[i] + radii[j] + padding
                if dist >= need:
                    continue
                if dist < 1e-9:
                    delta = np.array([1.0, 0.0]) * (i + 1)
                    dist = 1.0
                shift = (need - dist) / 2 * delta / dist
                pos[i] -= shift
                pos[j] += shift
                moved = True
        if not moved:
            return pos
    return pos


# -- assignment ------------------------------------------------------------------


@dataclass
class Placement:
    grid: HexGrid
    cell_of: dict[int, int]  # member -> grid position
    reserved: dict[int, list[int]] = field(default_factory=dict)  # rep -> glyph cells

    def occupant_map(self) -> dict[int, int]:
        return {pos: m for m, pos in self.cell_of.items()}

    def reserved_positions(self) -> set[int]:
        out = set()
        for rep, block in self.reserved.items():
            out.update(block)
        return out


def layout_objective(placement: Placement, dm: np.ndarray) -> float:
    """Sum over members of distances to grid-adjacent members; every
    unordered adjacent pair is counted twice, matching the double sum."""
    occupant = placement.occupant_map()
    total = 0.0
    for member, pos in placement.cell_of.items():
        for adj in placement.grid.neighbors(pos):
            other = occupant.get(adj)
            if other is not None:
                total += dm[member, other]
    return float(total)


def _place_representatives(
    grid: HexGrid, representatives: Sequence[int], occupied: set[int], reserved: set[int]
) -> Optional[dict[int, list[int]]]:
    blocks: dict[int, list[int]] = {}
    for rep in representatives:
        placed = False
        for pos in range(len(grid)):
            if pos in occupied or pos in reserved:
                continue
            if not grid.full_neighborhood(pos):
                continue
            block = [pos] + grid.neighbors(pos)
            if any(b in occupied or b in reserved for b in block):
                continue
            blocks[rep] = block
            occupied.add(pos)
            reserved.update(grid.neighbors(pos))
            placed = True
            break
        if not placed:
            return None
    return blocks


def greedy_assign(
    members: Sequence[int],
    dm: np.ndarray,
    grid: HexGrid,
    representatives: Sequence[int] = (),
) -> Placement:
    """Representatives claim seven-cell blocks first; remaining members fill
    cells in grid order, each cell taking the unassigned member that adds
    the least adjacent-pair cost.  Regrows the grid once on overflow."""
    members = list(members)
    reps = [r for r in representatives if r in set(members)]
    for attempt in (0, 1):
        occupied: set[int] = set()
        reserved: set[int] = set()
        blocks = _place_representatives(grid, reps, occupied, reserved)
        free_count = len(grid) - len(occupied) - len(reserved)
        if blocks is None or free_count < len(members) - len(reps):
            if attempt == 1:
                raise GridOverflow("grid cannot hold members plus glyph blocks")
            # glyph flowers need interior room; regrow with full-ring slack
            grid = hex_grid(3 * (len(members) + 7 * len(reps)) + 19)
            continue
        cell_of: dict[int, int] = {}
        occupant: dict[int, int] = {}
        rep_block_center = {rep: block[0] for rep, block in blocks.items()}
        for rep, center in rep_block_center.items():
            cell_of[rep] = center
            occupant[center] = rep
        remaining = [m for m in members if m not in rep_block_center]
        for pos in range(len(grid)):
            if not remaining:
                break
            if pos in occupied or pos in reserved:
                continue
            adjacent_members = [
                occupant[a] for a in grid.neighbors(pos) if a in occupant
            ]
            best_m = None
            best_cost = math.inf
            for m in remaining:
                cost = sum(dm[m, o] for o in adjacent_members)
                if cost < best_cost:
                    best_m, best_cost = m, cost
            cell_of[best_m] = pos
            occupant[pos] = best_m
            occupied.add(pos)
            remaining.remove(best_m)
        if remaining:
            if attempt == 1:
                raise GridOverflow("grid too small for members")
            grid = hex_grid(3 * (len(members) + 7 * len(reps)) + 19)
            continue
        return Placement(grid=grid, cell_of=cell_of, reserved=blocks)
    raise GridOverflow("unreachable")


def swap_refine(
    placement: Placement,
    dm: np.ndarray,
    max_passes: int = 50,
    frozen: Iterable[int] = (),
) -> Placement:
    """Best-improvement 2-swap refinement of an assignment.

    Repeatedly applies the grid-point pair exchange with the largest strict
    decrease of the adjacency objective; exchanging with an empty assignable
    cell relocates the member.  Representative centers, reserved glyph cells
    and `frozen` members never move.  Stops at a local optimum of this move
    set or after max_passes full scans."""
    grid = placement.grid
    occupant = placement.occupant_map()
    immovable_members = set(frozen) | set(placement.reserved.keys())
    reserved = placement.reserved_positions()

    def local(member: int, pos: int, skip: tuple[int, ...]) -> float:
        total = 0.0
        for adj in grid.neighbors(pos):
            if adj in skip:
                continue
            other = occupant.get(adj)
            if other is not None:
                total += dm[member, other]
        return total

    for _ in range(max_passes):
        movable = [
            (pos, m) for pos, m in occupant.items() if m not in immovable_members
        ]
        movable.sort()
        empty = [
            pos
            for pos in range(len(grid))
            if pos not in occupant and pos not in reserved
        ]
        best_delta = -1e-12
        best_move = None
        for i, (p1, m1) in enumerate(movable):
            for p2, m2 in movable[i + 1 :]:
                # the m1-m2 cross term is invariant under the swap when the
                # cells are adjacent, so both sides skip it
                old = local(m1, p1, (p2,)) + local(m2, p2, (p1,))
                new = local(m1, p2, (p1, p2)) + local(m2, p1, (p1, p2))
                delta = 2.0 * (new - old)
                if delta < best_delta:
                    best_delta = delta
                    best_move = (p1, m1, p2, m2)
            for p2 in empty:
                old = local(m1, p1, (p2,))
                new = local(m1, p2, (p1,))
                delta = 2.0 * (new - old)
                if delta < best_delta:
                    best_delta = delta
                    best_move = (p1, m1, p2, None)
        if best_move is None:
            break
        p1, m1, p2, m2 = best_move
        if m2 is None:
            del occupant[p1]
            occupant[p2] = m1
        else:
            occupant[p1], occupant[p2] = m2, m1
    cell_of = {m: pos for pos, m in occupant.items()}
    return Placement(grid=grid, cell_of=cell_of, reserved=dict(placement.reserved))


# -- glyph label anchors -----------------------------------------------------------


def place_labels(
    rep_xy: Sequence[tuple[float, float]],
    disc_radius: float,
    label_radius: float = 1.6,
) -> list[tuple[float, float]]:
    """Anchor one structure-glyph label per representative outside the disc:
    nearest free angular slot to the representative, no two anchors closer
    than a label diameter."""
    placed: list[tuple[float, float]] = []
    ring = disc_radius + label_radius
    for x, y in rep_xy:
        base = math.atan2(y, x) if (x, y) != (0.0, 0.0) else 0.0
        anchor = None
        radius = ring
        while anchor is None:
            for step in range(0, 25):
                for sign in (1, -1) if step else (1,):
                    ang = base + sign * step * (math.pi / 12)
                    cand = (radius * math.cos(ang), radius * math.sin(ang))
                    if all(
                        math.hypot(cand[0] - px, cand[1] - py) >= 2 * label_radius
                        for px, py in placed
                    ):
                        anchor = cand
                        break
                if anchor:
                    break
            radius += label_radius  # ring full: spiral outwards
        placed.append(anchor)
    return placed


# -- views -------------------------------------------------------------------------


@dataclass
class CellAssign:
    member: int
    arch_id: int
    q: int
    r: int
    x: float
    y: float


@dataclass
class GlyphInfo:
    member: int
    arch_id: int
    cells: list[tuple[int, int]]
    label_anchor: tuple[float, float]


@dataclass
class ClusterSlice:
    node_id: str
    center: tuple[float, float]
    cells: list[CellAssign]
    glyphs: list[GlyphInfo]
    objective: float


@dataclass
class ViewLayout:
    node_id: str
    level: int
    anchor: tuple[float, float]
    clusters: list[ClusterSlice]
    scale: float = 1.0
    parent_id: Optional[str] = None

    def members(self) -> list[int]:
        return [c.member for sl in self.clusters for c in sl.cells]

    def cell_lookup(self) -> dict[int, CellAssign]:
        return {c.member: c for sl in self.clusters for c in sl.cells}
