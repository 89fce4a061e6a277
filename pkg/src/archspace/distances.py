"""Pairwise structural distances over a space via its edit graph.

The edit graph has one vertex per architecture in the full space and one
edge per single-edit move; pairwise distances between sampled architectures
are shortest paths in it.  Non-sampled vertices stay in the graph as dummy
carriers so every minimum-cost edit path exists.  The all-pairs problem is
decomposed into one single-source run per sampled vertex; each run uses a
Dijkstra variant whose frontier is grouped into equal-cost buckets keyed by
quantized accumulated cost, so minimum extraction is amortized O(1).

Two alternative backends live here as well: an exact A* search over the
same edit moves (oracle scale) and an O(L^3) bipartite assignment bound for
spaces too large to enumerate.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .assignment import solve_assignment
from .errors import BudgetExceeded, Disconnected, SpaceTooLarge
from .spaces import (
    DEFAULT_HARD_CAP,
    Architecture,
    OpKind,
    SpaceSpec,
    arch_from_id,
    enumerate_space,
    one_edit_neighbors,
)

BUCKET_RESOLUTION_BITS = 20

BACKEND_EXACT_APSP = "exact_apsp"
BACKEND_EXACT_ASTAR = "exact_astar"
BACKEND_APPROX_BIPARTITE = "approx_bipartite"
BACKEND_TAGS = {BACKEND_EXACT_APSP: 0, BACKEND_EXACT_ASTAR: 1, BACKEND_APPROX_BIPARTITE: 2}


@dataclass
class ArchGraph:
    """Edit graph in CSR form. Immutable after build."""

    spec: SpaceSpec
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    arch_ids: np.ndarray  # vertex index -> arch_id, enumeration order
    is_sampled: np.ndarray
    index_of: dict = field(repr=False, default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.arch_ids)

    @property
    def sampled_count(self) -> int:
        return int(self.is_sampled.sum())

    def sampled_indices(self) -> np.ndarray:
        return np.flatnonzero(self.is_sampled)

    @property
    def max_edge_cost(self) -> float:
        return float(self.weights.max()) if len(self.weights) else 1.0

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])


@dataclass
class DistanceMatrix:
    """Symmetric pairwise distances among sampled architectures."""

    values: np.ndarray
    arch_ids: list[int]
    backend: str

    @property
    def n(self) -> int:
        return len(self.arch_ids)

    def index_of(self, arch_id: int) -> int:
        return self.arch_ids.index(arch_id)


# -- graph construction -------------------------------------------------------


def _build_op_slot_adjacency(spec: SpaceSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized neighbor table for slot spaces (uniform degree S*(C-1))."""
    C = spec.num_ops
    S = spec.num_slots
    N = spec.size()
    eff = spec.effective_cost_matrix()

    ranks = np.arange(N, dtype=np.int64)
    digits = np.empty((N, S), dtype=np.int64)
    r = ranks.copy()
    for s in range(S):
        digits[:, s] = r % C
        r //= C

    k = S * (C - 1)
    indices = np.empty((N, k), dtype=np.int64)
    weights = np.empty((N, k), dtype=np.float64)
    col = 0
    stride = 1
    for s in range(S):
        d = digits[:, s]
        block_idx = np.stack([ranks + (new - d) * stride for new in range(C)], axis=1)
        block_w = np.stack([eff[d, new] for new in range(C)], axis=1)
        # drop the self column: for each row exactly one target equals d
        keep = np.arange(C)[None, :] != d[:, None]
        indices[:, col : col + C - 1] = block_idx[keep].reshape(N, C - 1)
        weights[:, col : col + C - 1] = block_w[keep].reshape(N, C - 1)
        col += C - 1
        stride *= C

    indptr = np.arange(N + 1, dtype=np.int64) * k
    return indptr, indices.reshape(-1), weights.reshape(-1)


def _build_generic_adjacency(spec: SpaceSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, dict]:
    archs = list(enumerate_space(spec))
    arch_ids = np.array([a.arch_id for a in archs], dtype=np.int64)
    index_of = {int(aid): i for i, aid in enumerate(arch_ids)}
    indptr = [0]
    indices: list[int] = []
    weights: list[float] = []
    for a in archs:
        for nbr, cost in one_edit_neighbors(a):
            indices.append(index_of[nbr.arch_id])
            weights.append(cost)
        indptr.append(len(indices))
    return (
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(weights, dtype=np.float64),
        arch_ids,
        index_of,
    )


def build_arch_graph(
    spec: SpaceSpec,
    sampled: Sequence[int],
    hard_cap: int = DEFAULT_HARD_CAP,
) -> ArchGraph:
    """Edit graph over the full space; non-sampled vertices are dummies."""
    N = spec.size()
    if N > hard_cap:
        raise SpaceTooLarge(
            f"space has {N} vertices (cap {hard_cap}); use approx_ged_bipartite"
        )
    if spec.family == "op_slot":
        indptr, indices, weights = _build_op_slot_adjacency(spec)
        arch_ids = np.arange(N, dtype=np.int64)
        index_of = {}
    else:
        indptr, indices, weights, arch_ids, index_of = _build_generic_adjacency(spec)
    is_sampled = np.zeros(N, dtype=bool)
    for aid in sampled:
        idx = int(aid) if spec.family == "op_slot" else index_of[int(aid)]
        if not 0 <= idx < N:
            raise ValueError(f"arch_id {aid} outside space")
        is_sampled[idx] = True
    return ArchGraph(
        spec=spec,
        indptr=indptr,
        indices=indices,
        weights=weights,
        arch_ids=arch_ids,
        is_sampled=is_sampled,
        index_of=index_of,
    )


# -- single-source shortest paths ---------------------------------------------


def _concat_ranges(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Concatenate arange(start, start+count) for all rows, vectorized."""
    nonzero = counts > 0
    starts = starts[nonzero]
    counts = counts[nonzero]
    if len(starts) == 0:
        return np.empty(0, dtype=np.int64)
    out = np.ones(int(counts.sum()), dtype=np.int64)
    ends = np.cumsum(counts)
    out[0] = starts[0]
    out[ends[:-1]] = starts[1:] - (starts[:-1] + counts[:-1] - 1)
    return np.cumsum(out)


def bucket_resolution(g: ArchGraph) -> float:
    return g.max_edge_cost / (1 << BUCKET_RESOLUTION_BITS)


def sssp_bucketed(g: ArchGraph, source: int, resolution: Optional[float] = None) -> np.ndarray:
    """Exact shortest-path distances from one vertex to all N vertices.

    Frontier vertices are grouped by accumulated cost quantized to
    ``resolution`` (default: max edit cost / 2**20); the non-empty bucket
    keys form a sorted list so the minimum group pops in O(1) amortized.
    Quantization only shapes the grouping: within a popped bucket, only the
    vertices at the exact minimum cost are settled, so collisions between
    genuinely different costs cannot corrupt the result.
    """
    if resolution is None:
        resolution = bucket_resolution(g)
    N = g.vertex_count
    dist = np.full(N, np.inf)
    dist[source] = 0.0
    settled = np.zeros(N, dtype=bool)
    buckets: dict[int, list[np.ndarray]] = {0: [np.array([source], dtype=np.int64)]}
    key_heap = [0]
    in_heap = {0}

    indptr, indices, weights = g.indptr, g.indices, g.weights

    while key_heap:
        key = heapq.heappop(key_heap)
        in_heap.discard(key)
        chunks = buckets.pop(key, None)
        if not chunks:
            continue
        members = np.unique(np.concatenate(chunks))
        members = members[~settled[members]]
        if members.size == 0:
            continue
        dmem = dist[members]
        live = (dmem / resolution).astype(np.int64) == key  # drop stale entries
        members, dmem = members[live], dmem[live]
        if members.size == 0:
            continue
        exact_min = dmem.min()
        now = members[dmem == exact_min]
        rest = members[dmem != exact_min]
        if rest.size:
            buckets.setdefault(key, []).append(rest)
            if key not in in_heap:
                heapq.heappush(key_heap, key)
                in_heap.add(key)
        settled[now] = True

        starts = indptr[now]
        counts = indptr[now + 1] - starts
        edge_idx = _concat_ranges(starts, counts)
        if edge_idx.size == 0:
            continue
        nbrs = indices[edge_idx]
        cand = np.repeat(dist[now], counts) + weights[edge_idx]
        open_mask = ~settled[nbrs]
        nbrs, cand = nbrs[open_mask], cand[open_mask]
        if nbrs.size == 0:
            continue
        before = dist[nbrs]
        np.minimum.at(dist, nbrs, cand)
        changed = np.unique(nbrs[dist[nbrs] < before])
        if changed.size == 0:
            continue
        keys = (dist[changed] / resolution).astype(np.int64)
        order = np.argsort(keys, kind="stable")
        keys, verts = keys[order], changed[order]
        cut = np.flatnonzero(np.diff(keys)) + 1
        for seg, seg_key in zip(np.split(verts, cut), keys[np.r_[0, cut]] if cut.size else keys[:1]):
            k = int(seg_key)
            buckets.setdefault(k, []).append(seg)
            if k not in in_heap:
                heapq.heappush(key_heap, k)
                in_heap.add(k)
    return dist


def sssp_heap(g: ArchGraph, source: int) -> np.ndarray:
    """Reference binary-heap Dijkstra (independent of the bucketed path)."""
    N = g.vertex_count
    dist = np.full(N, np.inf)
    dist[source] = 0.0
    done = np.zeros(N, dtype=bool)
    pq = [(0.0, source)]
    indptr, indices, weights = g.indptr, g.indices, g.weights
    while pq:
        d, u = heapq.heappop(pq)
        if done[u]:
            continue
        done[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            v = int(indices[e])
            nd = d + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(pq, (nd, v))
    return dist


def apsp_sampled(g: ArchGraph, workers: int = 1) -> DistanceMatrix:
    """All sampled-pair distances: one bucketed SSSP per sampled vertex.

    Rows are independent; with workers > 1 they are distributed over a
    thread pool and written at disjoint offsets, so the result does not
    depend on scheduling.
    """
    sources = g.sampled_indices()
    n = len(sources)
    if n < 2:
        raise ValueError("need at least two sampled architectures")
    out = np.empty((n, n), dtype=np.float64)

    def run(i: int) -> None:
        out[i, :] = sssp_bucketed(g, int(sources[i]))[sources]

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(n)))
    else:
        for i in range(n):
            run(i)
    if not np.isfinite(out).all():
        raise Disconnected("sampled pair unreachable; space spec violates connectivity")
    arch_ids = [int(g.arch_ids[s]) for s in sources]
    return DistanceMatrix(values=out, arch_ids=arch_ids, backend=BACKEND_EXACT_APSP)


# -- exact A* ------------------------------------------------------------------

MAX_ASTAR_LAYERS = 16


def _active_layer_count(arch: Architecture) -> int:
    spec = arch.spec
    ops = arch.slots if spec.family == "op_slot" else arch.node_ops
    return sum(1 for o in ops if spec.ops[o].kind is not OpKind.NONE)


def _closure_cached(spec: SpaceSpec) -> np.ndarray:
    cached = getattr(spec, "_closure_cache", None)
    if cached is None:
        cached = spec.substitution_closure()
        spec._closure_cache = cached
    return cached


def _uniform_closure_params(spec: SpaceSpec, closure: np.ndarray):
    """(c_sub, c_none) when the closure has uniform structure, else None."""
    non_none = [i for i in range(spec.num_ops) if i != spec.none_index]
    subs = [closure[i, j] for i in non_none for j in non_none if i != j]
    if subs and len(set(subs)) != 1:
        return None
    c_sub = subs[0] if subs else 0.0
    if spec.none_index is None:
        return c_sub, 0.0
    nones = {closure[spec.none_index, i] for i in non_none}
    if len(nones) != 1:
        return None
    return c_sub, nones.pop()


def _multiset_bound_factory(spec: SpaceSpec, target_ops: Sequence[int]):
    """Admissible remaining-cost bound: optimal unordered op alignment.

    Uses closure costs so multi-step substitutions cannot undercut it.
    A uniform closure admits a closed-form count; otherwise the alignment
    is solved exactly on the leftover multisets.
    """
    closure = _closure_cached(spec)
    C = spec.num_ops
    target_counts = [0] * C
    for o in target_ops:
        target_counts[o] += 1
    uniform = _uniform_closure_params(spec, closure)
    none_idx = spec.none_index

    def bound(counts: list[int]) -> float:
        leftover_a = [max(0, counts[i] - target_counts[i]) for i in range(C)]
        leftover_b = [max(0, target_counts[i] - counts[i]) for i in range(C)]
        t = sum(leftover_a)
        if t == 0:
            return 0.0
        if uniform is not None:
            c_sub, c_none = uniform
            m = 0
            if none_idx is not None:
                m = leftover_a[none_idx] + leftover_b[none_idx]
            return c_sub * (t - m) + c_none * m
        rows = [i for i in range(C) for _ in range(leftover_a[i])]
        cols = [j for j in range(C) for _ in range(leftover_b[j])]
        matrix = closure[np.ix_(rows, cols)]
        _, total = solve_assignment(matrix)
        return total

    return bound


def exact_ged_astar(
    a: Architecture,
    b: Architecture,
    max_expansions: int = 1_000_000,
) -> float:
    """Minimum total edit cost from a to b under the space's edit moves.

    A* over the implicit edit graph; exact because the bound is admissible
    and consistent.  Intended for oracle-scale use (combined active layer
    count at most 16).
    """
    spec = a.spec
    if spec is not b.spec and spec != b.spec:
        raise ValueError("architectures must share a space")
    if _active_layer_count(a) + _active_layer_count(b) > MAX_ASTAR_LAYERS:
        raise ValueError("combined layer count exceeds the A* oracle cap")
    if spec.family == "op_slot":
        return _astar_op_slot(spec, a.slots, b.slots, max_expansions)
    return _astar_generic(a, b, max_expansions)


def _astar_op_slot(spec, src, dst, max_expansions):
    C = spec.num_ops
    S = spec.num_slots
    eff = spec.effective_cost_matrix()
    cost = eff.tolist()
    bound = _multiset_bound_factory(spec, dst)
    src = tuple(src)
    dst = tuple(dst)

    counts = [0] * C
    for o in src:
        counts[o] += 1
    start_h = bound(counts)
    best_g: dict[tuple, float] = {src: 0.0}
    tie = itertools.count()
    heap = [(start_h, next(tie), 0.0, src)]
    expansions = 0
    while heap:
        f, _, g, state = heapq.heappop(heap)
        if state == dst:
            return g
        if g > best_g.get(state, np.inf):
            continue
        expansions += 1
        if expansions > max_expansions:
            raise BudgetExceeded(f"A* expanded more than {max_expansions} states")
        counts = [0] * C
        for o in state:
            counts[o] += 1
        for s in range(S):
            old = state[s]
            row = cost[old]
            counts[old] -= 1
            for new in range(C):
                if new == old:
                    continue
                ng = g + row[new]
                nstate = state[:s] + (new,) + state[s + 1 :]
                if ng < best_g.get(nstate, np.inf):
                    best_g[nstate] = ng
                    counts[new] += 1
                    h = bound(counts)
                    counts[new] -= 1
                    heapq.heappush(heap, (ng + h, next(tie), ng, nstate))
            counts[old] += 1
    raise Disconnected("no edit path found")


def _astar_generic(a: Architecture, b: Architecture, max_expansions: int) -> float:
    spec = a.spec
    bound = _multiset_bound_factory(spec, b.node_ops)
    idc = spec.insertion_deletion_cost
    target_mask = b.edge_mask
    target_key = (b.node_ops, b.edge_mask)

    def h(state: Architecture) -> float:
        counts = [0] * spec.num_ops
        for o in state.node_ops:
            counts[o] += 1
        edge_gap = (state.edge_mask ^ target_mask).bit_count()
        return bound(counts) + idc * edge_gap

    start = a
    best_g = {(a.node_ops, a.edge_mask): 0.0}
    tie = itertools.count()
    heap = [(h(start), next(tie), 0.0, start)]
    expansions = 0
    while heap:
        f, _, g, state = heapq.heappop(heap)
        key = (state.node_ops, state.edge_mask)
        if key == target_key:
            return g
        if g > best_g.get(key, np.inf):
            continue
        expansions += 1
        if expansions > max_expansions:
            raise BudgetExceeded(f"A* expanded more than {max_expansions} states")
        for nbr, cost in one_edit_neighbors(state):
            nkey = (nbr.node_ops, nbr.edge_mask)
            ng = g + cost
            if ng < best_g.get(nkey, np.inf):
                best_g[nkey] = ng
                heapq.heappush(heap, (ng + h(nbr), next(tie), ng, nbr))
    raise Disconnected("no edit path found")


# -- bipartite approximation ---------------------------------------------------


def _layers(arch: Architecture) -> list[tuple[int, int]]:
    """(position, op) for every non-none layer."""
    spec = arch.spec
    ops = arch.slots if spec.family == "op_slot" else arch.node_ops
    return [(pos, o) for pos, o in enumerate(ops) if spec.ops[o].kind is not OpKind.NONE]


def approx_ged_bipartite(a: Architecture, b: Architecture) -> float:
    """Upper bound on the exact edit distance via one optimal assignment.

    Layers of both architectures are matched on an (La+Lb) square cost
    matrix: same-position substitutions at closure cost, cross-position
    matches and deletions/insertions routed through the null op, forbidden
    moves (no null op in the vocabulary) at a prohibitive constant that the
    always-feasible identity matching excludes from the optimum.  Every
    entry is the cost of a realizable edit sequence, so the assignment
    objective is the cost of a feasible edit path and never undercuts the
    exact distance.  The assignment solve is O(L^3).
    """
    spec = a.spec
    if spec is not b.spec and spec != b.spec:
        raise ValueError("architectures must share a space")
    closure = _closure_cached(spec)
    none_idx = spec.none_index
    la = _layers(a)
    lb = _layers(b)
    na, nb = len(la), len(lb)
    size = na + nb
    extra = 0.0
    if spec.family == "topology":
        extra = spec.insertion_deletion_cost * (a.edge_mask ^ b.edge_mask).bit_count()
    if size == 0:
        return extra

    if none_idx is not None:
        delete = [float(closure[op, none_idx]) for _, op in la]
        insert = [float(closure[none_idx, op]) for _, op in lb]
    else:
        # without a null op, deletions and cross-position matches are not
        # realizable edits; a feasible identity matching always exists, so
        # a ceiling above any feasible total keeps them out of the optimum
        delete = insert = None
    big = float(closure.max()) * size + spec.insertion_deletion_cost * size + 1.0
    if delete is not None:
        big += sum(delete) + sum(insert)

    M = np.full((size, size), big, dtype=np.float64)
    M[na:, nb:] = 0.0
    for i, (pos_a, op_a) in enumerate(la):
        for j, (pos_b, op_b) in enumerate(lb):
            if pos_a == pos_b:
                M[i, j] = closure[op_a, op_b]
            elif delete is not None:
                M[i, j] = delete[i] + insert[j]
    if delete is not None:
        for i in range(na):
            M[i, nb + i] = delete[i]
        for j in range(nb):
            M[na + j, j] = insert[j]

    _, total = solve_assignment(M)
    return float(total) + extra


def exact_pairwise_astar(
    spec: SpaceSpec,
    arch_ids: Sequence[int],
    time_budget: Optional[float] = None,
) -> tuple[np.ndarray, int, float]:
    """Pairwise exact distances via A*, the n^2 baseline.

    Stops early when ``time_budget`` seconds elapse; returns the matrix,
    the number of pairs completed and the elapsed time.
    """
    import time

    archs = [arch_from_id(spec, aid) for aid in arch_ids]
    n = len(archs)
    out = np.zeros((n, n), dtype=np.float64)
    done = 0
    t0 = time.perf_counter()
    for i in range(n):
        for j in range(i + 1, n):
            d = exact_ged_astar(archs[i], archs[j])
            out[i, j] = out[j, i] = d
            done += 1
            if time_budget is not None and time.perf_counter() - t0 > time_budget:
                return out, done, time.perf_counter() - t0
    return out, done, time.perf_counter() - t0
