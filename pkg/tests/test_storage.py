"""Persistence round trips and cache invalidation."""
import numpy as np
import pytest

from archspace import apsp_sampled, build_arch_graph
from archspace.clustering import ClusterParams, build_hierarchy, compute_representatives
from archspace.errors import CorruptFile, StaleCache
from archspace.layout import LayoutParams
from archspace.metrics import surrogate_table
from archspace.spaces import OpKind, OpType, SpaceSpec
from archspace.storage import (
    COST_SCALE,
    load_distances,
    load_tree,
    load_views,
    save_distances,
    save_tree,
    save_views,
)
from archspace.views import build_views


class TestDistanceCache:
    def test_round_trip_identical_bytes(self, tmp_path, toy_spec, toy_apsp):
        p1 = tmp_path / "d1.axdm"
        p2 = tmp_path / "d2.axdm"
        save_distances(toy_apsp, toy_spec, p1)
        loaded = load_distances(p1, toy_spec)
        save_distances(loaded, toy_spec, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_values_preserved_at_fixed_point_resolution(self, tmp_path, toy_spec, toy_apsp):
        p = tmp_path / "d.axdm"
        save_distances(toy_apsp, toy_spec, p)
        loaded = load_distances(p, toy_spec)
        assert loaded.arch_ids == toy_apsp.arch_ids
        assert loaded.backend == toy_apsp.backend
        assert np.abs(loaded.values - toy_apsp.values).max() <= 0.5 / COST_SCALE

    def test_large_matrix_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        n = 500
        vals = np.round(rng.uniform(0, 60, size=(n, n)) * COST_SCALE) / COST_SCALE
        vals = np.triu(vals, 1)
        vals = vals + vals.T
        from archspace.distances import DistanceMatrix
        from archspace.spaces import toy27_space

        spec = toy27_space()
        dm = DistanceMatrix(values=vals, arch_ids=list(range(n)), backend="exact_apsp")
        p = tmp_path / "big.axdm"
        save_distances(dm, spec, p)
        loaded = load_distances(p, spec)
        assert np.array_equal(loaded.values, vals)

    def test_cost_matrix_edit_invalidates(self, tmp_path, toy_spec, toy_apsp):
        p = tmp_path / "d.axdm"
        save_distances(toy_apsp, toy_spec, p)
        changed = SpaceSpec(
            family="op_slot",
            ops=[OpType(i, o.name, o.kind) for i, o in enumerate(toy_spec.ops)],
            num_slots=3,
            cost_matrix=np.array(
                [[0.0, 2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
            ),
        )
        with pytest.raises(StaleCache):
            load_distances(p, changed)

    def test_bad_magic_is_corrupt(self, tmp_path, toy_spec, toy_apsp):
        p = tmp_path / "d.axdm"
        save_distances(toy_apsp, toy_spec, p)
        blob = bytearray(p.read_bytes())
        blob[:4] = b"NOPE"
        p.write_bytes(bytes(blob))
        with pytest.raises(CorruptFile):
            load_distances(p, toy_spec)

    def test_truncated_is_corrupt(self, tmp_path, toy_spec, toy_apsp):
        p = tmp_path / "d.axdm"
        save_distances(toy_apsp, toy_spec, p)
        p.write_bytes(p.read_bytes()[:-40])
        with pytest.raises(CorruptFile):
            load_distances(p, toy_spec)


@pytest.fixture(scope="module")
def small_session(toy_spec):
    g = build_arch_graph(toy_spec, list(range(27)))
    dm = apsp_sampled(g)
    table = surrogate_table(toy_spec)
    acc = np.array([table.rows[a]["accuracy"] for a in dm.arch_ids])
    tree = build_hierarchy(dm, ClusterParams(min_cluster=8, max_depth=2, k_range=(2, 3)), accuracy=acc)
    compute_representatives(tree, dm, acc)
    views = build_views(tree, dm, table, LayoutParams(view_budget=30, zoom_budget=30))
    return dm, table, tree, views


class TestTreePersistence:
    def test_round_trip_identical_bytes(self, tmp_path, toy_spec, small_session):
        dm, _, tree, _ = small_session
        p1, p2 = tmp_path / "t1.json", tmp_path / "t2.json"
        save_tree(tree, toy_spec, p1)
        loaded = load_tree(p1, toy_spec)
        save_tree(loaded, toy_spec, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_structure_preserved(self, tmp_path, toy_spec, small_session):
        dm, _, tree, _ = small_session
        p = tmp_path / "t.json"
        save_tree(tree, toy_spec, p)
        loaded = load_tree(p, toy_spec)
        assert [(n.id, n.members, n.medoid) for n in loaded.nodes()] == [
            (n.id, n.members, n.medoid) for n in tree.nodes()
        ]

    def test_stale_on_different_spec(self, tmp_path, toy_spec, nas201_spec, small_session):
        dm, _, tree, _ = small_session
        p = tmp_path / "t.json"
        save_tree(tree, toy_spec, p)
        with pytest.raises(StaleCache):
            load_tree(p, nas201_spec)

    def test_corrupt_tree_file(self, tmp_path, toy_spec):
        p = tmp_path / "t.json"
        p.write_text('{"kind": "something_else"}')
        with pytest.raises(CorruptFile):
            load_tree(p, toy_spec)


class TestViewPersistence:
    def test_round_trip_identical_bytes(self, tmp_path, toy_spec, small_session):
        dm, _, _, views = small_session
        p1, p2 = tmp_path / "v1.json", tmp_path / "v2.json"
        save_views(views, toy_spec, dm.arch_ids, p1)
        loaded = load_views(p1, toy_spec, dm.arch_ids)
        save_views(loaded, toy_spec, dm.arch_ids, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_cells_preserved(self, tmp_path, toy_spec, small_session):
        dm, _, _, views = small_session
        p = tmp_path / "v.json"
        save_views(views, toy_spec, dm.arch_ids, p)
        loaded = load_views(p, toy_spec, dm.arch_ids)
        for node_id, view in views.items():
            got = loaded[node_id]
            assert [(c.member, c.q, c.r, c.x, c.y) for s in got.clusters for c in s.cells] == [
                (c.member, c.q, c.r, c.x, c.y) for s in view.clusters for c in s.cells
            ]

    def test_stale_on_sample_change(self, tmp_path, toy_spec, small_session):
        dm, _, _, views = small_session
        p = tmp_path / "v.json"
        save_views(views, toy_spec, dm.arch_ids, p)
        with pytest.raises(StaleCache):
            load_views(p, toy_spec, dm.arch_ids[:-1])
