"""Metric ingestion and the deterministic surrogate scorer."""
import numpy as np
import pytest

from archspace import Architecture, enumerate_space
from archspace.errors import DuplicateArch, OutOfRange, ParseError, UnknownArch
from archspace.metrics import (
    MetricTable,
    SurrogateModel,
    estimate_train_hours,
    extract_features,
    ingest_metrics,
    logistic,
    seeded_noise,
    surrogate_score,
    surrogate_table,
    write_metrics_csv,
)
from archspace.spaces import arch_from_rank


@pytest.fixture(scope="module")
def nas201_table(nas201_spec):
    return surrogate_table(nas201_spec)


def names(spec):
    return {o.name: o.id for o in spec.ops}


class TestIngest:
    def test_header_only_gives_empty_table(self, tmp_path, toy_spec):
        p = tmp_path / "m.csv"
        p.write_text("arch_id,accuracy,params,flops,train_time\n")
        table = ingest_metrics(p, toy_spec)
        assert len(table) == 0

    def test_accuracy_out_of_range_reports_row(self, tmp_path, toy_spec):
        p = tmp_path / "m.csv"
        p.write_text(
            "arch_id,accuracy,params,flops,train_time\n"
            "0,0.5,1,1,1\n"
            "1,1.2,1,1,1\n"
        )
        with pytest.raises(OutOfRange, match=":3:"):
            ingest_metrics(p, toy_spec)

    def test_unknown_arch_rejected(self, tmp_path, toy_spec):
        p = tmp_path / "m.csv"
        p.write_text("arch_id,accuracy,params,flops,train_time\n99,0.5,1,1,1\n")
        with pytest.raises(UnknownArch):
            ingest_metrics(p, toy_spec)

    def test_duplicate_arch_rejected(self, tmp_path, toy_spec):
        p = tmp_path / "m.csv"
        p.write_text(
            "arch_id,accuracy,params,flops,train_time\n0,0.5,1,1,1\n0,0.6,1,1,1\n"
        )
        with pytest.raises(DuplicateArch):
            ingest_metrics(p, toy_spec)

    def test_missing_column_rejected(self, tmp_path, toy_spec):
        p = tmp_path / "m.csv"
        p.write_text("arch_id,accuracy\n0,0.5\n")
        with pytest.raises(ParseError):
            ingest_metrics(p, toy_spec)

    def test_garbage_value_rejected(self, tmp_path, toy_spec):
        p = tmp_path / "m.csv"
        p.write_text("arch_id,accuracy,params,flops,train_time\n0,alot,1,1,1\n")
        with pytest.raises(ParseError):
            ingest_metrics(p, toy_spec)

    def test_full_space_export_round_trips_row_count(self, tmp_path, nas201_spec, nas201_table):
        p = tmp_path / "nas201.csv"
        write_metrics_csv(nas201_table, p)
        table = ingest_metrics(p, nas201_spec)
        assert len(table) == 15_625

    def test_extra_columns_preserved(self, tmp_path, toy_spec):
        p = tmp_path / "m.csv"
        p.write_text(
            "arch_id,accuracy,params,flops,train_time,note\n3,0.4,1,2,3,hello\n"
        )
        table = ingest_metrics(p, toy_spec)
        assert table.rows[3]["note"] == "hello"


class TestFeatures:
    def test_shortcut_and_paths(self, nas201_spec):
        n = names(nas201_spec)
        cell = Architecture(
            spec=nas201_spec,
            slots=(n["conv3x3"], n["conv3x3"], n["identity"], n["none"], n["conv3x3"], n["conv3x3"]),
        )
        f = extract_features(cell)
        assert f.identity_shortcut == 1
        assert f.max_conv3x3_stack == 2
        assert f.conv_path_count == 2
        assert f.conv_free_path_count == 1

    def test_all_none_is_zero_feature_vector(self, nas201_spec):
        n = names(nas201_spec)
        cell = Architecture(spec=nas201_spec, slots=(n["none"],) * 6)
        f = extract_features(cell)
        assert f.identity_shortcut == 0
        assert f.max_conv3x3_stack == 0
        assert f.conv_path_count == 0
        assert f.conv_free_path_count == 0
        assert sum(f.op_counts) == 6  # the none slots themselves


class TestSurrogate:
    def test_all_none_scores_base_plus_noise_only(self, nas201_spec):
        n = names(nas201_spec)
        cell = Architecture(spec=nas201_spec, slots=(n["none"],) * 6)
        model = SurrogateModel(seed=0)
        expected = logistic(model.base + seeded_noise(0, cell.arch_id, model.noise_scale))
        assert surrogate_score(cell, model) == expected

    def test_frozen_reference_value(self, nas201_spec):
        # regression anchor for cross-platform determinism
        a = arch_from_rank(nas201_spec, 1234)
        assert surrogate_score(a, SurrogateModel(seed=0)) == 0.578834449247079

    def test_adding_avg_pool_strictly_decreases(self, nas201_spec):
        # flip a dead slot (no path through it) from none to avgpool: the
        # only feature change is the avgpool count, and its weight exceeds
        # the noise bound
        n = names(nas201_spec)
        base = Architecture(
            spec=nas201_spec,
            slots=(n["none"], n["conv3x3"], n["identity"], n["none"], n["none"], n["conv3x3"]),
        )
        worse = Architecture(
            spec=nas201_spec,
            slots=(n["none"], n["conv3x3"], n["identity"], n["avgpool3x3"], n["none"], n["conv3x3"]),
        )
        fb, fw = extract_features(base), extract_features(worse)
        assert fb.conv_path_count == fw.conv_path_count
        assert fb.conv_free_path_count == fw.conv_free_path_count
        model = SurrogateModel(seed=7)
        assert surrogate_score(worse, model) < surrogate_score(base, model)

    def test_deterministic_across_calls(self, nas201_spec):
        model = SurrogateModel(seed=11)
        a = arch_from_rank(nas201_spec, 9_999)
        assert surrogate_score(a, model) == surrogate_score(a, model)

    def test_noise_is_bounded(self):
        import math

        bound = math.sqrt(3.0) * 0.01
        for arch_id in range(2_000):
            assert abs(seeded_noise(3, arch_id, 0.01)) <= bound

    def test_p4_pass_population_mean_exceeds_fail(self, nas201_spec, nas201_table):
        from archspace.principles import make_principle

        p4 = make_principle("P4")
        pass_acc, fail_acc = [], []
        for arch in enumerate_space(nas201_spec):
            acc = nas201_table.accuracy(arch.arch_id)
            (pass_acc if p4(arch) else fail_acc).append(acc)
        assert np.mean(pass_acc) > np.mean(fail_acc)

    def test_quantiles(self):
        table = MetricTable(space_hash="x", provenance="surrogate")
        for i, acc in enumerate([0.1, 0.5, 0.9, 0.7]):
            table.rows[i] = {"accuracy": acc, "params": 0, "flops": 0, "train_time": 0}
        q = table.accuracy_quantiles()
        assert q[0] == 0.0 and q[2] == 1.0
        assert q[3] == pytest.approx(2 / 3)

    def test_estimate_train_hours_is_sample_mean(self, toy_spec):
        table = surrogate_table(toy_spec)
        est = estimate_train_hours(table, seed=0, sample=10)
        times = [r["train_time"] for r in table.rows.values()]
        assert min(times) <= est <= max(times)
        assert estimate_train_hours(table, seed=0, sample=10) == est
