"""Tests for accuracy metrics, the throughput benchmark and report rendering."""
import json

import pytest

from typeflow.core import TypeFlowGNN, VocabSizes, preset
from typeflow.infrastructure.error_handling import MissingPrediction
from typeflow.monitoring import (
    BenchReport,
    CategoryScore,
    bench_table,
    collect_predictions,
    evaluate_model,
    files_per_second,
    graph_stats_table,
    metrics_table,
    plot_accuracy,
    plot_k_sweep,
    plot_throughput,
    size_quartiles,
    throughput_bench,
    topk_accuracy,
    write_json,
)
from typeflow.pipeline.checkpoint import Checkpoint
from typeflow.pipeline.dataset import SourceFile


@pytest.fixture
def scored():
    predictions = {
        "a": ["number", "string"],
        "b": ["number", "x1", "x2", "x3", "string"],
        "c": ["t1", "t2", "t3", "t4", "t5", "Foo"],
    }
    labels = {"a": "number", "b": "string", "c": "Foo"}
    return topk_accuracy(predictions, labels, ["number", "string"], {"a": "name", "c": "literal"}, files_evaluated=2)


@pytest.fixture
def model(bundle, small_dims):
    config = preset("rgnn", type_count=len(bundle.types), **small_dims)
    return TypeFlowGNN(config, VocabSizes.from_bundle(bundle))


@pytest.mark.unit
class TestTopkAccuracy:
    """Test top-1/top-5 scoring by category."""

    def test_all(self, scored):
        """Test overall counts and rates."""
        assert scored.all.count == 3
        assert scored.all.top1 == pytest.approx(1 / 3)
        assert scored.all.top5 == pytest.approx(2 / 3)

    def test_frequent_and_rest(self, scored):
        """Test the split by training frequency."""
        assert scored.top10_frequent == CategoryScore(2, 0.5, 1.0)
        assert scored.rest == CategoryScore(1, 0.0, 0.0)

    def test_by_signal(self, scored):
        """Test per signal-class scores."""
        assert scored.by_signal["name"] == CategoryScore(1, 1.0, 1.0)
        assert scored.by_signal["literal"] == CategoryScore(1, 0.0, 0.0)

    def test_empty_category(self):
        """Test that an empty category reports no rates."""
        report = topk_accuracy({"a": ["number"]}, {"a": "number"}, ["number"])

        assert report.rest == CategoryScore()
        assert report.to_dict()["rest"] == {"count": 0, "top1": None, "top5": None}

    def test_missing_prediction(self):
        """Test a labeled node without a ranked prediction."""
        with pytest.raises(MissingPrediction):
            topk_accuracy({}, {"a": "number"}, [])

    def test_to_dict(self, scored):
        """Test the JSON document layout."""
        document = scored.to_dict()

        assert set(document) == {"all", "top10_frequent", "rest", "files_evaluated", "by_signal"}
        assert document["files_evaluated"] == 2
        assert list(document["by_signal"]) == ["literal", "name"]


@pytest.mark.unit
class TestEvaluateModel:
    """Test scoring a model over prepared files."""

    def test_collect_predictions(self, model, indexed, bundle):
        """Test that every labeled node gets a ranked list of vocabulary types."""
        collected = collect_predictions(model, indexed, bundle, batch_size=4)
        expected = sum(len(e.labels) for e in indexed)

        assert len(collected.labels) == len(collected.predictions) == expected
        assert collected.files_evaluated == len(indexed)
        for ranked in collected.predictions.values():
            assert len(ranked) == min(5, len(bundle.types))
            assert set(ranked) <= set(bundle.types.entries)

    def test_batch_size_does_not_matter(self, model, indexed, bundle):
        """Test that batching leaves predictions unchanged."""
        one = collect_predictions(model, indexed, bundle, batch_size=1)
        many = collect_predictions(model, indexed, bundle, batch_size=5)
        assert one.predictions == many.predictions

    def test_evaluate_model(self, model, indexed, bundle):
        """Test the report and its model summary."""
        report = evaluate_model(model, indexed, bundle, name="tiny")

        assert report.all.count == sum(len(e.labels) for e in indexed)
        assert 0.0 <= report.all.top1 <= report.all.top5 <= 1.0
        assert report.model["name"] == "tiny"
        assert report.model["preset"] == "rgnn"
        assert report.all.count == report.top10_frequent.count + report.rest.count
        assert report.by_signal


@pytest.mark.unit
class TestReports:
    """Test tables, JSON and plots."""

    def test_files_per_second(self):
        """Test the rate and its guard."""
        assert files_per_second(10, 2.0) == 5.0
        with pytest.raises(ValueError):
            files_per_second(10, 0.0)

    def test_size_quartiles(self):
        """Test five-number summaries."""
        assert size_quartiles([5, 1, 3, 2, 4]) == [1.0, 2.0, 3.0, 4.0, 5.0]
        assert size_quartiles([]) == [0.0] * 5

    def test_write_json(self, tmp_path, scored):
        """Test sorted, indented output on disk."""
        path = tmp_path / "out" / "metrics.json"
        text = write_json(scored.to_dict(), path)

        assert path.read_text(encoding="utf-8") == text + "\n"
        assert json.loads(text)["all"]["count"] == 3

    def test_tables(self, scored):
        """Test one row per model or split."""
        scored.model = {"name": "rgnn", "parameters": 10}
        assert metrics_table([scored, scored]).row_count == 2
        stats = {"train": {"files": [3], "nodes": [1, 2, 3, 4, 5], "edges": [2, 4, 6, 8, 10]}}
        assert graph_stats_table(stats).row_count == 1

    def test_plots_are_reproducible(self, tmp_path, scored):
        """Test that identical inputs give identical SVG files."""
        first, second = tmp_path / "a.svg", tmp_path / "b.svg"
        plot_k_sweep({1: 0.5, 2: 0.6, 4: 0.7}, first)
        plot_k_sweep({1: 0.5, 2: 0.6, 4: 0.7}, second)

        assert first.read_bytes() == second.read_bytes()
        assert b"<svg" in first.read_bytes()
        plot_accuracy([scored], tmp_path / "accuracy.svg")
        assert (tmp_path / "accuracy.svg").exists()


@pytest.mark.integration
class TestThroughputBench:
    """Test the inference benchmark end to end."""

    def test_bench(self, model, bundle, generated, tmp_path):
        """Test a short benchmark run and its report."""
        checkpoint = Checkpoint.from_model(model, bundle)
        sources = [SourceFile(p.file_id, p.source) for p in generated.files[:4]]

        report = throughput_bench(checkpoint, sources, batch_size=2, repeats=2, warmup=1)

        assert isinstance(report, BenchReport)
        assert report.files == 4
        assert len(report.exclusive.samples) == 2
        assert all(rate > 0 for rate in report.exclusive.samples + report.inclusive.samples)
        assert report.exclusive.mean >= report.inclusive.mean
        assert report.to_dict()["files_per_second"]["samples"] == report.exclusive.samples
        assert bench_table([report]).row_count == 1
        plot_throughput([report], tmp_path / "throughput.svg")
        assert (tmp_path / "throughput.svg").exists()

    def test_warmup_passes_discarded(self, model, bundle, generated):
        """Test that warmup timings never reach the reported rates."""
        checkpoint = Checkpoint.from_model(model, bundle)
        sources = [SourceFile(p.file_id, p.source) for p in generated.files[:2]]

        report = throughput_bench(checkpoint, sources, batch_size=2, repeats=1, warmup=3)

        assert len(report.exclusive.samples) == 1
        assert len(report.inclusive.samples) == 1

    def test_no_files(self, model, bundle):
        """Test that an empty source list is refused."""
        with pytest.raises(ValueError):
            throughput_bench(Checkpoint.from_model(model, bundle), [], repeats=1)
