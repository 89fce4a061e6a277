"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the criterion lines.
"""
import contextlib
import itertools
import os
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as scipy_dijkstra

from archspace import (
    apsp_sampled,
    approx_ged_bipartite,
    build_arch_graph,
    enumerate_space,
    exact_ged_astar,
    nasbench201_space,
    sssp_bucketed,
    toy27_space,
)
from archspace.clustering import (
    ClusterNode,
    ClusterParams,
    ClusterTree,
    grid_search_k,
    kmedoids,
    sample_cluster_aware,
)
from archspace.distances import exact_pairwise_astar
from archspace.layout import (
    Placement,
    greedy_assign,
    hex_grid,
    layout_objective,
    swap_refine,
)
from archspace.metrics import ingest_metrics, surrogate_table
from archspace.principles import (
    default_principles,
    evaluate_principles,
    filtered_search,
    make_principle,
    principle_significance,
    split_by_principle,
)
from archspace.spaces import Architecture, arch_from_rank


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}", flush=True)
        raise
    print(f"[PASS] {name}", flush=True)


@pytest.fixture(scope="module")
def nas201():
    return nasbench201_space()


@pytest.fixture(scope="module")
def nas201_table(nas201):
    return surrogate_table(nas201)


class TestAcceptance:
    def test_oracle_equivalence_on_toy_space(self, toy_spec, toy_graph, toy_apsp):
        with criterion("oracle equivalence: APSP == A* on all 351 pairs of the 27-arch space, tolerance 0, < 10 s"):
            t0 = time.perf_counter()
            archs = list(enumerate_space(toy_spec))
            dm = apsp_sampled(toy_graph)
            for i, j in itertools.combinations(range(27), 2):
                assert exact_ged_astar(archs[i], archs[j]) == dm.values[i, j]
            assert time.perf_counter() - t0 < 10.0

    def test_bucketed_dijkstra_equals_heap_reference(self, nas201):
        with criterion("bucketed SSSP bit-identical to heap Dijkstra, 100 sources on the 15,625-vertex graph, build + 100 SSSPs < 60 s"):
            rng = np.random.default_rng(42)
            t0 = time.perf_counter()
            graph = build_arch_graph(nas201, list(range(0, 15_625, 156))[:100])
            sources = rng.integers(0, graph.vertex_count, 100)
            mine = np.stack([sssp_bucketed(graph, int(s)) for s in sources])
            elapsed = time.perf_counter() - t0
            assert elapsed < 60.0
            mat = csr_matrix(
                (graph.weights, graph.indices, graph.indptr),
                shape=(graph.vertex_count,) * 2,
            )
            reference = scipy_dijkstra(mat, directed=True, indices=sources)
            assert np.array_equal(mine, reference)

    def test_apsp_at_least_ten_times_faster_than_pairwise_astar(self, nas201):
        with criterion("APSP-via-SSSP >= 10x faster than pairwise A* for n=100 on the 15,625 space"):
            rng = np.random.default_rng(1)
            sampled = sorted(int(x) for x in rng.choice(nas201.size(), 100, replace=False))
            t0 = time.perf_counter()
            graph = build_arch_graph(nas201, sampled)
            apsp_sampled(graph)
            t_apsp = time.perf_counter() - t0
            threshold = 10.0 * t_apsp
            total_pairs = 100 * 99 // 2
            # stop once elapsed exceeds the threshold: the remaining pairs
            # can only add time, so the 10x conclusion already holds
            _, pairs_done, t_astar = exact_pairwise_astar(
                nas201, sampled, time_budget=threshold * 1.05
            )
            if pairs_done == total_pairs:
                assert t_astar >= threshold
            else:
                assert t_astar > threshold

    def test_bipartite_upper_bound(self, toy_spec, toy_apsp):
        with criterion("bipartite backend >= exact on all toy pairs, equal on substitution-only pairs"):
            archs = list(enumerate_space(toy_spec))
            none_id = toy_spec.none_index
            for i, j in itertools.combinations(range(27), 2):
                approx = approx_ged_bipartite(archs[i], archs[j])
                exact = toy_apsp.values[i, j]
                assert approx >= exact - 1e-9
                substitution_only = all(
                    (a == none_id) == (b == none_id)
                    for a, b in zip(archs[i].slots, archs[j].slots)
                )
                if substitution_only:
                    assert approx == pytest.approx(exact, abs=1e-9)

    def test_layout_quality(self, toy_apsp):
        with criterion("greedy+swap within 5% of brute force on 30 random instances (N <= 8); outputs verified 2-swap-optimal"):
            rng = np.random.default_rng(0)
            for _ in range(30):
                n = int(rng.integers(3, 9))
                idx = rng.choice(27, n, replace=False)
                dm = toy_apsp.values[np.ix_(idx, idx)]
                grid = hex_grid(n)
                refined = swap_refine(greedy_assign(list(range(n)), dm, grid), dm)
                got = layout_objective(refined, dm)
                best = self._brute_force(n, dm, grid)
                assert got <= best * 1.05 + 1e-9
                self._assert_two_swap_optimal(refined, dm)

    @staticmethod
    def _brute_force(n, dm, grid):
        size = len(grid)
        D = np.zeros((size, size))
        D[:n, :n] = dm
        perms = np.array(list(itertools.permutations(range(size))), dtype=np.int16)
        pairs = [(p, a) for p in range(size) for a in grid.neighbors(p) if a > p]
        total = np.zeros(len(perms))
        for p, a in pairs:
            total += D[perms[:, p], perms[:, a]]
        return float(total.min()) * 2.0

    @staticmethod
    def _assert_two_swap_optimal(placement, dm):
        base = layout_objective(placement, dm)
        occupant = placement.occupant_map()
        positions = sorted(occupant)
        empties = [
            p
            for p in range(len(placement.grid))
            if p not in occupant and p not in placement.reserved_positions()
        ]
        for p1, p2 in itertools.combinations(positions, 2):
            trial = dict(placement.cell_of)
            trial[occupant[p1]], trial[occupant[p2]] = p2, p1
            alt = layout_objective(Placement(grid=placement.grid, cell_of=trial), dm)
            assert alt >= base - 1e-9
        for p1 in positions:
            for p2 in empties:
                trial = dict(placement.cell_of)
                trial[occupant[p1]] = p2
                alt = layout_objective(Placement(grid=placement.grid, cell_of=trial), dm)
                assert alt >= base - 1e-9

    def test_clustering_properties(self):
        with criterion("K-medoids objective monotone; two-blob K*=2; sampling quota floor on 100 random trees"):
            # monotone objective on logged runs
            rng = np.random.default_rng(0)
            for seed in range(30):
                pts = np.random.default_rng(seed).uniform(0, 1, size=(24, 2))
                d = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
                res = kmedoids(d, list(range(24)), K=4, seed=seed)
                trace = res.objective_trace
                assert all(a >= b - 1e-12 for a, b in zip(trace, trace[1:]))
            # two-blob synthetic recovered at K* = 2
            blob = np.full((8, 8), 10.0)
            blob[:4, :4] = 1.0
            blob[4:, 4:] = 1.0
            np.fill_diagonal(blob, 0.0)
            assert grid_search_k(blob, list(range(8)), (2, 6)) == 2
            # quota floor on random synthetic trees
            for trial in range(100):
                r = np.random.default_rng(trial)
                k = int(r.integers(2, 6))
                sizes = [int(r.integers(3, 90)) for _ in range(k)]
                n = sum(sizes)
                root = ClusterNode(id="0", level=0, members=list(range(n)), medoid=0)
                start = 0
                for i, s in enumerate(sizes):
                    rows = list(range(start, start + s))
                    root.children.append(
                        ClusterNode(id=f"0.{i}", level=1, members=rows, medoid=rows[0])
                    )
                    start += s
                tree = ClusterTree(root=root, arch_ids=list(range(n)), params=ClusterParams())
                budget = int(r.integers(10 * k, max(10 * k + 1, n + 10)))
                out = sample_cluster_aware(tree, np.zeros((n, n)), level=1, budget=budget)
                for child in root.children:
                    got = len(set(out.selected) & set(child.members))
                    assert got >= min(10, child.size)

    def test_principle_predicates(self, nas201):
        with criterion("reference cell passes P4-P8; exhaustive P5 pass-count equals the histogram oracle"):
            names = {o.name: o.id for o in nas201.ops}
            # identity on the direct input-output edge plus two conv3x3 chains
            cell = Architecture(
                spec=nas201,
                slots=(
                    names["conv3x3"],   # 0-1
                    names["conv3x3"],   # 0-2
                    names["identity"],  # 0-3
                    names["none"],      # 1-2
                    names["conv3x3"],   # 1-3
                    names["conv3x3"],   # 2-3
                ),
            )
            results = evaluate_principles(cell, default_principles())
            assert all(results[p] for p in ("P4", "P5", "P6", "P7", "P8"))

            p5 = make_principle("P5")
            count = sum(1 for a in enumerate_space(nas201) if p5(a))
            avg_id = names["avgpool3x3"]
            ranks = np.arange(nas201.size())
            digits = np.empty((len(ranks), 6), dtype=np.int64)
            rem = ranks.copy()
            for s in range(6):
                digits[:, s] = rem % 5
                rem //= 5
            histogram_count = int((digits != avg_id).all(axis=1).sum())
            assert count == histogram_count

    def test_search_cost_reduction(self, nas201, nas201_table):
        with criterion("filtered random search matches the unfiltered best using <= 50% of its evaluations (median of 20 paired seeds)"):
            scorer = lambda a: nas201_table.accuracy(a.arch_id)  # noqa: E731
            filters = [make_principle(p) for p in ("P4", "P5", "P6", "P7", "P8")]
            budget = 400
            fractions = []
            for seed in range(20):
                unfiltered = filtered_search(nas201, scorer, "random", [], budget, seed)
                filtered = filtered_search(nas201, scorer, "random", filters, budget, seed)
                needed = filtered.evaluations_to_reach(unfiltered.best_score)
                fractions.append(
                    needed / len(unfiltered.evaluated) if needed is not None else float("inf")
                )
            fractions.sort()
            median = (fractions[9] + fractions[10]) / 2
            assert median <= 0.5

    def test_real_benchmark_p5_significance(self, nas201):
        csv_path = os.environ.get("NB201_ACCURACY_CSV")
        if not csv_path:
            pytest.skip("NB201_ACCURACY_CSV not set; conditional reproduction skipped")
        with criterion("real benchmark CSV: P5 split significant at p < 0.001 with the avg-pool group lower"):
            table = ingest_metrics(csv_path, nas201)
            passes, fails = split_by_principle(nas201, table, make_principle("P5"))
            out = principle_significance(passes, fails)
            assert out["p_value"] < 1e-3
            assert out["effect_direction"] == "pass_higher"

    def test_out_of_scope_items_documented(self):
        with criterion("non-reproducible items (trained-network tables, GPU-hour totals, activation-map rates) documented as out of scope"):
            readme = Path(__file__).resolve().parents[1] / "README.md"
            text = readme.read_text(encoding="utf-8").lower()
            assert "out of scope" in text
            assert "generalization" in text
            assert "gpu-hour" in text or "gpu hour" in text
            assert "activation" in text
