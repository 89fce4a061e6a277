"""Structural design principles as executable predicates, their statistical
evaluation, and principle-filtered architecture search.

Principles encode structural properties empirically tied to accuracy:

  P1  skip-connection count at least t1 (score-only by default)
  P2  no pooling op is the last non-identity op on any input-output path
  P3  at most t3 max-pooling ops
  P4  an identity op directly connects input and output
  P5  no average-pooling ops
  P6  some path stacks two or more 3x3 convolutions
  P7  two or more paths contain a 3x3 convolution
  P8  at most one path without any convolution

Filter-mode principles discard candidates before they are scored; discards
are recorded but never consume evaluation budget.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EmptyGroup, ExhaustedSpace, ParseError
from .metrics import MetricTable, extract_features
from .spaces import (
    Architecture,
    OpKind,
    SpaceSpec,
    arch_from_id,
    one_edit_neighbors,
)

FILTER = "filter"
SCORE_ONLY = "score_only"


@dataclass(frozen=True)
class Principle:
    id: str
    predicate: Callable[[Architecture], bool]
    mode: str = FILTER
    params: dict = field(default_factory=dict)

    def __call__(self, arch: Architecture) -> bool:
        return self.predicate(arch)


def _encoded_kind_count(arch: Architecture, kind: OpKind) -> int:
    spec = arch.spec
    ops = arch.slots if spec.family == "op_slot" else arch.node_ops
    return sum(1 for o in ops if spec.ops[o].kind is kind)


def p1_skip_connections(arch: Architecture, t1: int = 0) -> bool:
    return _encoded_kind_count(arch, OpKind.IDENTITY) >= t1


def p2_no_trailing_pool(arch: Architecture) -> bool:
    return not extract_features(arch).has_trailing_pool


def p3_few_max_pools(arch: Architecture, t3: int = 1) -> bool:
    return _encoded_kind_count(arch, OpKind.POOL_MAX) <= t3


def p4_identity_shortcut(arch: Architecture) -> bool:
    return extract_features(arch).identity_shortcut == 1


def p5_no_avg_pool(arch: Architecture) -> bool:
    return _encoded_kind_count(arch, OpKind.POOL_AVG) == 0


def p6_stacked_conv3x3(arch: Architecture) -> bool:
    return extract_features(arch).max_conv3x3_stack >= 2


def p7_multiple_conv3x3_paths(arch: Architecture) -> bool:
    return extract_features(arch).conv3x3_path_count >= 2


def p8_single_conv_free_path(arch: Architecture) -> bool:
    return extract_features(arch).conv_free_path_count <= 1


_BUILDERS = {
    "P1": (p1_skip_connections, {"t1": 0}, SCORE_ONLY),
    "P2": (p2_no_trailing_pool, {}, FILTER),
    "P3": (p3_few_max_pools, {"t3": 1}, FILTER),
    "P4": (p4_identity_shortcut, {}, FILTER),
    "P5": (p5_no_avg_pool, {}, FILTER),
    "P6": (p6_stacked_conv3x3, {}, FILTER),
    "P7": (p7_multiple_conv3x3_paths, {}, FILTER),
    "P8": (p8_single_conv_free_path, {}, FILTER),
}


def make_principle(pid: str, mode: Optional[str] = None, params: Optional[dict] = None) -> Principle:
    if pid not in _BUILDERS:
        raise ParseError(f"unknown principle id {pid!r}")
    fn, defaults, default_mode = _BUILDERS[pid]
    merged = dict(defaults)
    merged.update(params or {})

    def predicate(arch: Architecture, _fn=fn, _kw=merged) -> bool:
        return _fn(arch, **_kw) if _kw else _fn(arch)

    return Principle(id=pid, predicate=predicate, mode=mode or default_mode, params=merged)


def default_principles(ids: Sequence[str] = ("P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8")) -> list[Principle]:
    return [make_principle(pid) for pid in ids]


def evaluate_principles(arch: Architecture, principles: Sequence[Principle]) -> dict[str, bool]:
    return {p.id: p(arch) for p in principles}


def principles_from_json(text: str) -> list[Principle]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid principle config: {exc}") from exc
    if not isinstance(doc, list):
        raise ParseError("principle config must be a JSON array")
    return [
        make_principle(entry["id"], entry.get("mode"), entry.get("params"))
        for entry in doc
    ]


def principles_to_json(principles: Sequence[Principle]) -> str:
    return json.dumps(
        [{"id": p.id, "mode": p.mode, "params": p.params} for p in principles],
        indent=2,
    ) + "\n"


# -- statistics ----------------------------------------------------------------


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def mann_whitney_one_sided(greater: Sequence[float], lesser: Sequence[float]) -> dict:
    """One-sided Mann-Whitney U (normal approximation, tie-corrected
    variance, no continuity correction): H1 says `greater` is
    stochastically larger than `lesser`."""
    x = np.asarray(greater, dtype=np.float64)
    y = np.asarray(lesser, dtype=np.float64)
    if len(x) == 0 or len(y) == 0:
        raise EmptyGroup("both comparison groups must be nonempty")
    combined = np.concatenate([x, y])
    order = np.argsort(combined, kind="mergesort")
    ranks = np.empty(len(combined), dtype=np.float64)
    ranks[order] = np.arange(1, len(combined) + 1)
    # average ranks within tie groups
    sorted_vals = combined[order]
    i = 0
    tie_term = 0.0
    while i < len(sorted_vals):
        j = i
        while j < len(sorted_vals) and sorted_vals[j] == sorted_vals[i]:
            j += 1
        if j - i > 1:
            t = j - i
            tie_term += t**3 - t
            ranks[order[i:j]] = (i + 1 + j) / 2.0
        i = j
    n1, n2 = len(x), len(y)
    n = n1 + n2
    r1 = float(ranks[:n1].sum())
    u = r1 - n1 * (n1 + 1) / 2.0
    mean_u = n1 * n2 / 2.0
    var_u = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_u <= 0:
        p = 0.5  # all values identical
        z = 0.0
    else:
        z = (u - mean_u) / math.sqrt(var_u)
        p = _normal_sf(z)
    p = min(max(p, 1e-308), 1.0 - 1e-16)
    return {"u": u, "z": z, "p_value": p}


def principle_significance(
    pass_accuracies: Sequence[float], fail_accuracies: Sequence[float]
) -> dict:
    """Compare accuracy of principle-passing vs failing architectures.

    One-sided alternative: the passing group is higher.  Returns p_value,
    effect_direction and both group means.
    """
    stats = mann_whitney_one_sided(pass_accuracies, fail_accuracies)
    mean_pass = float(np.mean(pass_accuracies))
    mean_fail = float(np.mean(fail_accuracies))
    if mean_pass > mean_fail:
        direction = "pass_higher"
    elif mean_pass < mean_fail:
        direction = "fail_higher"
    else:
        direction = "equal"
    return {
        "p_value": stats["p_value"],
        "effect_direction": direction,
        "group_means": {"pass": mean_pass, "fail": mean_fail},
        "u": stats["u"],
        "z": stats["z"],
        "n_pass": len(pass_accuracies),
        "n_fail": len(fail_accuracies),
    }


def split_by_principle(
    spec: SpaceSpec, table: MetricTable, principle: Principle
) -> tuple[list[float], list[float]]:
    passes, fails = [], []
    for arch_id in table.rows:
        arch = arch_from_id(spec, arch_id)
        (passes if principle(arch) else fails).append(table.accuracy(arch_id))
    return passes, fails


# -- search --------------------------------------------------------------------


@dataclass
class SearchParams:
    population: int = 50
    tournament: int = 10
    mutation_attempts: int = 200


@dataclass
class SearchTrace:
    strategy: str
    seed: int
    budget: int
    evaluated: list[tuple[int, float]]
    discarded_by_filter: int
    best_curve: list[float]
    per_arch_hours: float
    principle_ids: list[str]

    @property
    def best_score(self) -> float:
        return self.best_curve[-1] if self.best_curve else float("-inf")

    @property
    def estimated_cost(self) -> float:
        return len(self.evaluated) * self.per_arch_hours

    def evaluations_to_reach(self, target: float) -> Optional[int]:
        for i, score in enumerate(self.best_curve):
            if score >= target:
                return i + 1
        return None

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "budget": self.budget,
            "evaluated": [[a, s] for a, s in self.evaluated],
            "discarded_by_filter": self.discarded_by_filter,
            "best_curve": self.best_curve,
            "per_arch_hours": self.per_arch_hours,
            "estimated_cost": self.estimated_cost,
            "principles": self.principle_ids,
            "best_score": self.best_score,
        }


def _passes_filters(arch: Architecture, filters: Sequence[Principle]) -> bool:
    return all(p(arch) for p in filters)


def filtered_search(
    spec: SpaceSpec,
    scorer: Callable[[Architecture], float],
    strategy: str,
    principles: Sequence[Principle],
    budget: int,
    seed: int,
    per_arch_hours: float = 1.0,
    params: SearchParams = SearchParams(),
) -> SearchTrace:
    """Search with filter-mode principles discarding candidates pre-score.

    `random` proposes architectures uniformly without replacement (seeded
    permutation of the enumerable space); `evolution` is regularized
    evolution (population 50, tournament 10, single-edit mutation).
    Discarded candidates never consume budget.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if strategy not in ("random", "evolution"):
        raise ValueError(f"unknown strategy {strategy!r}")
    filters = [p for p in principles if p.mode == FILTER]
    rng = np.random.default_rng(seed)
    order = rng.permutation(spec.size())

    evaluated: list[tuple[int, float]] = []
    best_curve: list[float] = []
    discarded = 0
    best = float("-inf")

    def record(arch: Architecture, score: float) -> None:
        nonlocal best
        evaluated.append((arch.arch_id, float(score)))
        best = max(best, float(score))
        best_curve.append(best)

    stream = iter(order.tolist())

    def next_passing() -> Optional[Architecture]:
        nonlocal discarded
        for rank in stream:
            arch = arch_from_id(spec, int(rank))
            if _passes_filters(arch, filters):
                return arch
            discarded += 1
        return None

    if strategy == "random":
        while len(evaluated) < budget:
            arch = next_passing()
            if arch is None:
                break
            record(arch, scorer(arch))
        if not evaluated:
            raise ExhaustedSpace("principle filters rejected every architecture")
    else:
        population: list[tuple[Architecture, float]] = []
        while len(population) < min(params.population, budget):
            arch = next_passing()
            if arch is None:
                break
            score = scorer(arch)
            record(arch, score)
            population.append((arch, score))
        if not population:
            raise ExhaustedSpace("principle filters rejected every architecture")
        while len(evaluated) < budget:
            k = min(params.tournament, len(population))
            picks = rng.choice(len(population), size=k, replace=False)
            parent = max((population[i] for i in picks), key=lambda t: t[1])[0]
            neighbors = one_edit_neighbors(parent)
            child = None
            for _ in range(params.mutation_attempts):
                cand = neighbors[int(rng.integers(0, len(neighbors)))][0]
                if _passes_filters(cand, filters):
                    child = cand
                    break
                discarded += 1
            if child is None:
                child = next_passing()  # keeps progress if a parent is walled in
                if child is None:
                    break
            score = scorer(child)
            record(child, score)
            population.append((child, score))
            if len(population) > params.population:
                population.pop(0)

    return SearchTrace(
        strategy=strategy,
        seed=seed,
        budget=budget,
        evaluated=evaluated,
        discarded_by_filter=discarded,
        best_curve=best_curve,
        per_arch_hours=per_arch_hours,
        principle_ids=[p.id for p in principles],
    )
