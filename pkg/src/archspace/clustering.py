"""Top-down K-medoids hierarchy over a distance matrix, plus the
cluster-aware display sampling and per-cluster representative selection.

All functions are pure given (matrix, seed); the hierarchy is rebuilt
deterministically from the same inputs.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetTooSmall, DegenerateK

MIN_PER_CLUSTER = 10
MAX_ITERATIONS = 100


@dataclass
class ClusterParams:
    k_range: tuple[int, int] = (2, 10)
    restarts: int = 5
    max_depth: int = 3
    min_cluster: int = 40
    seed: int = 0


@dataclass
class KMedoidsResult:
    assignment: np.ndarray  # position in `members` -> cluster 0..K-1
    medoids: list[int]  # global member indices, one per cluster
    objective: float
    objective_trace: list[float]
    iterations: int


def _coerce(dm) -> np.ndarray:
    return dm.values if hasattr(dm, "values") else np.asarray(dm, dtype=np.float64)


def _distinct_representatives(sub: np.ndarray) -> list[int]:
    """Local indices of zero-distance equivalence class representatives."""
    m = sub.shape[0]
    reps: list[int] = []
    claimed = np.zeros(m, dtype=bool)
    for i in range(m):
        if claimed[i]:
            continue
        reps.append(i)
        claimed |= sub[i] == 0.0
    return reps


def kmedoids(dm, members: Sequence[int], K: int, seed: int = 0) -> KMedoidsResult:
    """Alternating assign/update K-medoids, deterministic given the seed.

    The objective (total distance of members to their medoid) is logged
    after every assignment step and never increases.
    """
    values = _coerce(dm)
    members = list(members)
    m = len(members)
    if not 2 <= K <= m:
        raise ValueError(f"K={K} outside [2, {m}]")
    sub = values[np.ix_(members, members)]
    reps = _distinct_representatives(sub)
    if K > len(reps):
        raise DegenerateK(f"K={K} exceeds {len(reps)} distinct members")

    rng = random.Random(seed)
    medoid_locals = sorted(rng.sample(reps, K))

    trace: list[float] = []
    assignment = np.zeros(m, dtype=np.int64)
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        to_medoids = sub[:, medoid_locals]
        assignment = np.argmin(to_medoids, axis=1)
        trace.append(float(to_medoids[np.arange(m), assignment].sum()))

        new_medoids = list(medoid_locals)
        for c in range(K):
            rows = np.flatnonzero(assignment == c)
            if rows.size == 0:
                continue  # keep the old medoid for an emptied cluster
            within = sub[np.ix_(rows, rows)]
            new_medoids[c] = int(rows[int(np.argmin(within.sum(axis=0)))])
        if new_medoids == medoid_locals:
            break
        medoid_locals = new_medoids

    to_medoids = sub[:, medoid_locals]
    assignment = np.argmin(to_medoids, axis=1)
    objective = float(to_medoids[np.arange(m), assignment].sum())
    return KMedoidsResult(
        assignment=assignment,
        medoids=[members[i] for i in medoid_locals],
        objective=objective,
        objective_trace=trace,
        iterations=iterations,
    )


def grid_search_scores(
    dm,
    members: Sequence[int],
    k_range: tuple[int, int],
    restarts: int = 5,
    seed: int = 0,
) -> list[tuple[int, float, KMedoidsResult]]:
    """Best-of-restarts K-medoids per K with its selection score.

    The score is the average distance to the cluster center, taken over
    the members that are not themselves centers (a medoid is the center,
    not a distance to it).  Infeasible K values (more clusters than
    distinct members) are skipped.
    """
    members = list(members)
    out = []
    for K in range(k_range[0], k_range[1] + 1):
        if K > len(members):
            break
        best: Optional[KMedoidsResult] = None
        try:
            for r in range(restarts):
                res = kmedoids(dm, members, K, seed=seed + r)
                if best is None or res.objective < best.objective:
                    best = res
        except DegenerateK:
            continue
        if best is None:
            continue
        denom = max(1, len(members) - K)
        out.append((K, best.objective / denom, best))
    return out


def grid_search_k(
    dm,
    members: Sequence[int],
    k_range: tuple[int, int],
    restarts: int = 5,
    seed: int = 0,
) -> int:
    """K with the minimum average distance to the center; ties pick the
    smaller K."""
    scores = grid_search_scores(dm, members, k_range, restarts=restarts, seed=seed)
    if not scores:
        raise DegenerateK(f"no feasible K in {k_range}")
    best_k, best_score = scores[0][0], scores[0][1]
    for K, score, _ in scores[1:]:
        if score < best_score:
            best_k, best_score = K, score
    return best_k


# -- hierarchy ---------------------------------------------------------------


@dataclass
class ClusterNode:
    id: str
    level: int
    members: list[int]
    medoid: int
    children: list["ClusterNode"] = field(default_factory=list)
    representatives: list[int] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.members)

    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class ClusterTree:
    root: ClusterNode
    arch_ids: list[int]  # distance-matrix order
    params: ClusterParams

    def nodes(self) -> list[ClusterNode]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def node_by_id(self, node_id: str) -> Optional[ClusterNode]:
        for node in self.nodes():
            if node.id == node_id:
                return node
        return None

    def partition_at_level(self, level: int) -> list[ClusterNode]:
        """Clusters forming the display partition at a navigation level."""
        out = []

        def walk(node: ClusterNode):
            if node.level == level or node.is_leaf():
                out.append(node)
                return
            for child in node.children:
                walk(child)

        walk(self.root)
        return out

    @property
    def depth(self) -> int:
        return max(node.level for node in self.nodes())


def _medoid_of(values: np.ndarray, members: Sequence[int]) -> int:
    sub = values[np.ix_(members, members)]
    return int(members[int(np.argmin(sub.sum(axis=0)))])


def _node_stats(members: Sequence[int], accuracy: Optional[np.ndarray]) -> dict:
    stats = {"size": len(members)}
    if accuracy is not None:
        acc = accuracy[list(members)]
        stats["mean_accuracy"] = float(acc.mean())
        stats["max_accuracy"] = float(acc.max())
    return stats


def build_hierarchy(
    dm,
    params: ClusterParams = ClusterParams(),
    accuracy: Optional[np.ndarray] = None,
) -> ClusterTree:
    """Recursive top-down split: grid-searched K at every internal node,
    stopping at max_depth or below min_cluster members."""
    values = _coerce(dm)
    n = values.shape[0]
    arch_ids = list(dm.arch_ids) if hasattr(dm, "arch_ids") else list(range(n))

    def split(node: ClusterNode) -> None:
        if node.level >= params.max_depth or node.size < params.min_cluster:
            return
        sub = values[np.ix_(node.members, node.members)]
        distinct = len(_distinct_representatives(sub))
        if distinct < 2:
            return
        k_hi = min(params.k_range[1], distinct, node.size)
        k_lo = min(params.k_range[0], k_hi)
        if k_hi < 2:
            return
        scores = grid_search_scores(
            values, node.members, (max(2, k_lo), k_hi), restarts=params.restarts, seed=params.seed
        )
        if not scores:
            return
        best_k, best_score, best = scores[0]
        for K, score, res in scores[1:]:
            if score < best_score:
                best_k, best_score, best = K, score, res
        for c in range(best_k):
            rows = [node.members[i] for i in np.flatnonzero(best.assignment == c)]
            if not rows:
                continue
            child = ClusterNode(
                id=f"{node.id}.{len(node.children)}",
                level=node.level + 1,
                members=rows,
                medoid=_medoid_of(values, rows),
                stats=_node_stats(rows, accuracy),
            )
            node.children.append(child)
            split(child)

    root = ClusterNode(
        id="0",
        level=0,
        members=list(range(n)),
        medoid=_medoid_of(values, list(range(n))),
        stats=_node_stats(list(range(n)), accuracy),
    )
    split(root)
    return ClusterTree(root=root, arch_ids=arch_ids, params=params)


# -- cluster-aware sampling ----------------------------------------------------


@dataclass
class SampleSet:
    level: int
    selected: list[int]
    quotas: dict[str, int]


def farthest_point_order(
    dm_values: np.ndarray, members: Sequence[int], seeds: Sequence[int], count: int
) -> list[int]:
    """Greedy max-min-distance traversal starting from `seeds`."""
    chosen = list(seeds)
    pool = [m for m in members if m not in set(chosen)]
    while pool and len(chosen) < count:
        best_m, best_d = pool[0], -1.0
        for m in pool:
            d = min(dm_values[m, c] for c in chosen) if chosen else np.inf
            if d > best_d:
                best_m, best_d = m, d
        chosen.append(best_m)
        pool.remove(best_m)
    return chosen[:count]


def sample_partition(
    clusters: Sequence[ClusterNode],
    dm,
    budget: int,
    min_per_cluster: int = MIN_PER_CLUSTER,
) -> tuple[dict[str, list[int]], dict[str, int]]:
    """Per-cluster quota picks over an explicit partition."""
    values = _coerce(dm)
    n = sum(c.size for c in clusters)
    if budget < min_per_cluster * len(clusters) and budget < n:
        raise BudgetTooSmall(
            f"budget {budget} below {min_per_cluster} x {len(clusters)} clusters"
        )
    picks: dict[str, list[int]] = {}
    quotas: dict[str, int] = {}
    for cluster in clusters:
        if budget >= n:
            quota = cluster.size
        else:
            quota = max(min_per_cluster, round(budget * cluster.size / n))
            quota = min(quota, cluster.size)
        quotas[cluster.id] = quota
        picks[cluster.id] = farthest_point_order(
            values, cluster.members, [cluster.medoid], quota
        )
    return picks, quotas


def sample_cluster_aware(
    tree: ClusterTree,
    dm,
    level: int,
    budget: int,
    min_per_cluster: int = MIN_PER_CLUSTER,
) -> SampleSet:
    """Display sample preserving relative cluster sizes with a per-cluster
    floor of min(min_per_cluster, cluster size)."""
    clusters = tree.partition_at_level(level)
    picks, quotas = sample_partition(clusters, dm, budget, min_per_cluster)
    selected = [m for cluster in clusters for m in picks[cluster.id]]
    return SampleSet(level=level, selected=selected, quotas=quotas)


# -- representatives -----------------------------------------------------------


def select_representatives(
    node: ClusterNode,
    dm,
    accuracy: Optional[np.ndarray],
    count_range: tuple[int, int] = (2, 5),
) -> list[int]:
    """Medoid first, then farthest-point picks from the node's ten most
    accurate members, between count_range[0] and count_range[1] total."""
    values = _coerce(dm)
    members = node.members
    if len(members) == 1:
        return [node.medoid]
    if accuracy is None:
        ranked = list(members)
    else:
        ranked = sorted(members, key=lambda m: (-accuracy[m], m))
    pool = [m for m in ranked[:10] if m != node.medoid]
    lo, hi = count_range
    target = min(hi, 1 + len(pool), len(members))
    target = max(target, min(lo, len(members)))
    chosen = farthest_point_order(values, pool, [node.medoid], target)
    return chosen


def compute_representatives(
    tree: ClusterTree,
    dm,
    accuracy: Optional[np.ndarray],
    count_range: tuple[int, int] = (2, 5),
) -> None:
    for node in tree.nodes():
        node.representatives = select_representatives(node, dm, accuracy, count_range)
