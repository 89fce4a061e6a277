"""K-medoids, grid-searched K, the hierarchy, sampling and representatives."""
import itertools

import numpy as np
import pytest

from archspace.clustering import (
    ClusterNode,
    ClusterParams,
    ClusterTree,
    build_hierarchy,
    compute_representatives,
    farthest_point_order,
    grid_search_k,
    grid_search_scores,
    kmedoids,
    sample_cluster_aware,
    select_representatives,
    _medoid_of,
)
from archspace.errors import BudgetTooSmall, DegenerateK


def two_blob_matrix(sizes=(4, 4), intra=1.0, inter=10.0):
    n = sum(sizes)
    d = np.full((n, n), inter)
    start = 0
    for s in sizes:
        d[start : start + s, start : start + s] = intra
        start += s
    np.fill_diagonal(d, 0.0)
    return d


def line_metric(xs):
    xs = np.asarray(xs, dtype=float)
    return np.abs(xs[:, None] - xs[None, :])


def random_metric(seed, n):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, size=(n, 2))
    return np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)


class TestKMedoids:
    def test_k_equals_members_zero_objective(self):
        d = random_metric(0, 6)
        res = kmedoids(d, list(range(6)), K=6, seed=1)
        assert res.objective == 0.0
        assert sorted(res.medoids) == list(range(6))

    def test_two_blobs_recovered(self):
        d = two_blob_matrix()
        res = kmedoids(d, list(range(8)), K=2, seed=0)
        groups = [set(np.flatnonzero(res.assignment == c)) for c in range(2)]
        assert sorted(groups, key=min) == [{0, 1, 2, 3}, {4, 5, 6, 7}]
        assert res.objective == 6.0

    def test_objective_trace_non_increasing_50_trials(self):
        for seed in range(50):
            d = random_metric(seed, 20)
            res = kmedoids(d, list(range(20)), K=3, seed=seed)
            trace = res.objective_trace
            assert all(a >= b - 1e-12 for a, b in zip(trace, trace[1:]))
            assert res.iterations <= 100

    def test_degenerate_k(self):
        d = np.zeros((5, 5))
        d[0, 1:] = d[1:, 0] = 1.0  # only two distinct points
        with pytest.raises(DegenerateK):
            kmedoids(d, list(range(5)), K=3, seed=0)

    def test_deterministic_given_seed(self):
        d = random_metric(3, 15)
        a = kmedoids(d, list(range(15)), K=4, seed=9)
        b = kmedoids(d, list(range(15)), K=4, seed=9)
        assert a.medoids == b.medoids
        assert np.array_equal(a.assignment, b.assignment)

    def test_medoid_minimizes_within_cluster_distance(self):
        d = random_metric(8, 25)
        res = kmedoids(d, list(range(25)), K=3, seed=2)
        for c, medoid in enumerate(res.medoids):
            rows = np.flatnonzero(res.assignment == c)
            totals = d[np.ix_(rows, rows)].sum(axis=0)
            assert d[np.ix_(rows, rows)][:, list(rows).index(medoid)].sum() == totals.min()


class TestGridSearchK:
    def test_two_blob_selects_k2(self):
        d = two_blob_matrix(sizes=(4, 4))
        assert grid_search_k(d, list(range(8)), (2, 6)) == 2

    def test_two_blob_k2_never_beaten(self):
        d = two_blob_matrix(sizes=(5, 5))
        scores = grid_search_scores(d, list(range(10)), (2, 6))
        by_k = {K: s for K, s, _ in scores}
        assert all(by_k[2] <= by_k[K] + 1e-12 for K in by_k)

    def test_two_members(self):
        d = np.array([[0.0, 3.0], [3.0, 0.0]])
        assert grid_search_k(d, [0, 1], (2, 2)) == 2
        scores = grid_search_scores(d, [0, 1], (2, 2))
        assert scores[0][1] == 0.0  # both points are centers

    def test_uniform_random_matrix_argmin_definition(self):
        rng = np.random.default_rng(17)
        m = rng.uniform(0.1, 1.0, size=(12, 12))
        d = (m + m.T) / 2
        np.fill_diagonal(d, 0.0)
        scores = grid_search_scores(d, list(range(12)), (2, 4))
        best = min(scores, key=lambda t: (t[1], t[0]))[0]
        assert grid_search_k(d, list(range(12)), (2, 4)) == best


class TestHierarchy:
    def test_small_input_single_leaf(self):
        d = random_metric(1, 10)
        tree = build_hierarchy(d, ClusterParams(min_cluster=40))
        assert tree.root.is_leaf()
        assert tree.root.members == list(range(10))

    def test_two_blob_depth_one(self):
        d = two_blob_matrix(sizes=(25, 25))
        tree = build_hierarchy(d, ClusterParams(min_cluster=10, max_depth=1, k_range=(2, 6)))
        assert len(tree.root.children) == 2
        groups = sorted([set(c.members) for c in tree.root.children], key=min)
        assert groups == [set(range(25)), set(range(25, 50))]

    def test_partition_property_every_node(self):
        d = random_metric(5, 120)
        tree = build_hierarchy(d, ClusterParams(min_cluster=20, max_depth=3))
        for node in tree.nodes():
            if node.children:
                union = sorted(m for c in node.children for m in c.members)
                assert union == sorted(node.members)
                sizes = sum(c.size for c in node.children)
                assert sizes == node.size

    def test_medoid_property_every_node(self):
        d = random_metric(6, 80)
        tree = build_hierarchy(d, ClusterParams(min_cluster=15))
        for node in tree.nodes():
            totals = d[np.ix_(node.members, node.members)].sum(axis=0)
            got = d[np.ix_(node.members, node.members)].sum(axis=0)[
                node.members.index(node.medoid)
            ]
            assert got == totals.min()

    def test_determinism(self):
        d = random_metric(9, 90)
        p = ClusterParams(min_cluster=15, seed=4)
        t1 = build_hierarchy(d, p)
        t2 = build_hierarchy(d, p)
        ids1 = [(n.id, tuple(n.members), n.medoid) for n in t1.nodes()]
        ids2 = [(n.id, tuple(n.members), n.medoid) for n in t2.nodes()]
        assert ids1 == ids2

    def test_stats_attached(self):
        d = random_metric(2, 30)
        acc = np.linspace(0.1, 0.9, 30)
        tree = build_hierarchy(d, ClusterParams(min_cluster=10, max_depth=1), accuracy=acc)
        assert tree.root.stats["size"] == 30
        assert tree.root.stats["max_accuracy"] == pytest.approx(0.9)


def synthetic_tree(sizes):
    n = sum(sizes)
    members = list(range(n))
    root = ClusterNode(id="0", level=0, members=members, medoid=0)
    start = 0
    for i, s in enumerate(sizes):
        rows = members[start : start + s]
        root.children.append(
            ClusterNode(id=f"0.{i}", level=1, members=rows, medoid=rows[0])
        )
        start += s
    return ClusterTree(root=root, arch_ids=members, params=ClusterParams())


class TestSampling:
    def test_budget_at_least_n_selects_all(self):
        tree = synthetic_tree([30, 20])
        d = np.zeros((50, 50))
        out = sample_cluster_aware(tree, d, level=1, budget=50)
        assert sorted(out.selected) == list(range(50))

    def test_quota_formula_800_150_50(self):
        tree = synthetic_tree([800, 150, 50])
        d = np.zeros((1000, 1000))
        out = sample_cluster_aware(tree, d, level=1, budget=200)
        assert out.quotas == {"0.0": 160, "0.1": 30, "0.2": 10}

    def test_quota_floor_always_met(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            k = int(rng.integers(2, 6))
            sizes = [int(rng.integers(3, 120)) for _ in range(k)]
            tree = synthetic_tree(sizes)
            n = sum(sizes)
            budget = int(rng.integers(10 * k, max(10 * k + 1, n + 20)))
            d = np.zeros((n, n))
            out = sample_cluster_aware(tree, d, level=1, budget=budget)
            for node in tree.root.children:
                got = len(set(out.selected) & set(node.members))
                assert got >= min(10, node.size)
                assert out.quotas[node.id] >= min(10, node.size)

    def test_relative_sizes_preserved(self):
        tree = synthetic_tree([500, 300, 200])
        d = np.zeros((1000, 1000))
        budget = 100
        out = sample_cluster_aware(tree, d, level=1, budget=budget)
        for node in tree.root.children:
            if node.size >= 10 * 1000 / budget:
                frac_quota = out.quotas[node.id] / budget
                frac_size = node.size / 1000
                assert abs(frac_quota - frac_size) <= 1 / budget + 1 / budget

    def test_budget_too_small(self):
        tree = synthetic_tree([40, 40, 40])
        d = np.zeros((120, 120))
        with pytest.raises(BudgetTooSmall):
            sample_cluster_aware(tree, d, level=1, budget=25)

    def test_medoid_always_sampled(self):
        xs = np.concatenate([np.linspace(0, 1, 30), np.linspace(50, 51, 20)])
        d = line_metric(xs)
        tree = build_hierarchy(d, ClusterParams(min_cluster=10, max_depth=1, k_range=(2, 3)))
        out = sample_cluster_aware(tree, d, level=1, budget=30)
        for node in tree.partition_at_level(1):
            assert node.medoid in out.selected


class TestRepresentatives:
    def test_singleton_cluster(self):
        node = ClusterNode(id="x", level=1, members=[3], medoid=3)
        assert select_representatives(node, np.zeros((5, 5)), None) == [3]

    def test_medoid_not_duplicated_when_top_accuracy(self):
        xs = [0.0, 1.0, 2.0, 3.0, 4.0]
        d = line_metric(xs)
        node = ClusterNode(id="x", level=0, members=list(range(5)), medoid=_medoid_of(d, list(range(5))))
        acc = np.array([0.1, 0.2, 0.99, 0.3, 0.4])  # medoid (2) also top accuracy
        reps = select_representatives(node, d, acc)
        assert reps.count(node.medoid) == 1
        assert len(set(reps)) == len(reps)
        assert reps[0] == node.medoid
        assert len(reps) >= 2

    def test_brute_force_max_min_distance(self):
        # a tight mass at zero plus three well-separated clumps of two;
        # the ten most accurate members form the candidate pool
        xs = [0.0] * 14 + [100.0, 100.0, 200.0, 200.0, 300.0, 300.0]
        d = line_metric(xs)
        members = list(range(20))
        medoid = _medoid_of(d, members)
        node = ClusterNode(id="x", level=0, members=members, medoid=medoid)
        acc = np.full(20, 0.5)
        acc[14:20] = [0.95, 0.951, 0.952, 0.953, 0.954, 0.955]
        acc[10:14] = [0.90, 0.901, 0.902, 0.903]
        assert acc[medoid] == 0.5  # medoid stays out of the accuracy pool
        reps = select_representatives(node, d, acc, count_range=(2, 4))
        assert reps[0] == medoid and len(reps) == 4

        def min_pairwise(sel):
            return min(d[a, b] for a, b in itertools.combinations(sel, 2))

        pool = sorted(members, key=lambda m: (-acc[m], m))[:10]
        assert len(pool) == 10 and medoid not in pool
        best = max(
            min_pairwise([medoid, *combo])
            for combo in itertools.combinations(pool, 3)
        )
        assert min_pairwise(reps) == pytest.approx(best)

    def test_compute_representatives_fills_all_nodes(self):
        d = random_metric(4, 60)
        tree = build_hierarchy(d, ClusterParams(min_cluster=15, max_depth=2))
        compute_representatives(tree, d, np.linspace(0, 1, 60))
        for node in tree.nodes():
            assert 1 <= len(node.representatives) <= 5
            assert node.representatives[0] == node.medoid


class TestFarthestPoint:
    def test_deterministic_and_spread(self):
        xs = [0.0, 1.0, 2.0, 10.0, 11.0, 20.0]
        d = line_metric(xs)
        picks = farthest_point_order(d, list(range(6)), [0], 3)
        assert picks[0] == 0
        assert picks[1] == 5  # farthest from 0
        assert picks[2] == 3  # maximizes min distance to {0, 20}
