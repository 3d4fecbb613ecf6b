"""Tests for the synthetic corpus generator."""
import json
from collections import Counter

import pytest

from typeflow.corpus import (
    SIGNAL_CLASSES,
    TYPE_ORDER,
    GenSpec,
    check_signals,
    default_palette,
    generate_corpus,
    generate_file,
    label_frequencies,
    write_corpus,
)
from typeflow.corpus.generator import LITERAL_TYPES
from typeflow.frontend.parser import parse_source
from typeflow.frontend.annotations import strip_annotations
from typeflow.graph.validation import validate_tfg
from typeflow.infrastructure.error_handling import SpecError
from typeflow.pipeline.dataset import prepare_file


@pytest.mark.unit
class TestGenSpec:
    """Test generation parameters and their constraints."""

    def test_defaults_pass(self):
        """Test that the default spec is satisfiable."""
        GenSpec().check()
        assert sum(default_palette().values()) == pytest.approx(1.0)
        assert list(default_palette()) == list(TYPE_ORDER)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"files": -1},
            {"functions_per_file": (0, 2)},
            {"statements_per_function": (5, 3)},
            {"palette": {"number": 1.0, "Widget": 1.0}},
            {"signal_mix": {"literal": 1.0, "telepathy": 1.0}},
            {"palette": {"number": -1.0, "string": 2.0}},
            {"signal_mix": {"literal": 0.0, "name": 0.0}},
            {"palette": {"Date": 1.0, "Map": 1.0}, "signal_mix": {"literal": 1.0}},
            {"functions_per_file": (1, 20), "statements_per_function": (3, 20)},
        ],
    )
    def test_unsatisfiable(self, overrides):
        """Test every rejected configuration."""
        with pytest.raises(SpecError):
            GenSpec(**overrides).check()

    def test_small_palette_warns_only(self):
        """Test that a short palette is accepted."""
        GenSpec(palette={"number": 1.0, "string": 1.0}).check()

    def test_from_json(self, tmp_path):
        """Test loading a spec file and rejecting malformed ones."""
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"seed": 4, "files": 3}), encoding="utf-8")
        assert GenSpec.load(path) == GenSpec(seed=4, files=3)

        with pytest.raises(SpecError):
            GenSpec.from_json({"files": "many"})
        path.write_text("{", encoding="utf-8")
        with pytest.raises(SpecError):
            GenSpec.load(path)


@pytest.mark.unit
class TestGenerateFile:
    """Test single-file generation."""

    def test_deterministic(self, small_spec):
        """Test that a file depends only on seed and index."""
        assert generate_file(small_spec, 3).source == generate_file(small_spec, 3).source
        assert generate_file(small_spec, 3).source != generate_file(small_spec, 4).source
        assert generate_file(small_spec, 3).source != generate_file(small_spec.model_copy(update={"seed": 8}), 3).source

    def test_parses_after_stripping(self, generated):
        """Test that every generated file is valid input once annotations are removed."""
        for plan in generated.files:
            stripped, raw = strip_annotations(plan.source)
            parse_source(stripped)
            assert len(raw) == len(plan.labels)

    def test_signals_hold(self, generated):
        """Test that every label's recorded source is present in the code."""
        for plan in generated.files:
            assert check_signals(plan) == []
            assert {label.signal_class for label in plan.labels} <= set(SIGNAL_CLASSES)

    def test_manifest_entries(self, generated):
        """Test that manifest entries carry span, name, type and signal class."""
        for plan in generated.files:
            assert len(plan.manifest) == len(plan.labels)
            for entry, label in zip(plan.manifest, plan.labels):
                assert set(entry) == {"span", "name", "type", "signal_class"}
                assert (entry["name"], entry["type"]) == (label.name, label.type)
                start, end = entry["span"]
                assert end - start == len(label.name.encode("utf-8"))

    def test_labels_survive_preparation(self, generated):
        """Test that canonical labels of a prepared file match the manifest types."""
        for plan in generated.files:
            example = prepare_file(plan.file_id, plan.source, 5000, plan.manifest)
            assert Counter(example.tfg.labels.values()) == Counter(e["type"] for e in plan.manifest)

    def test_graphs_validate(self, generated):
        """Test that the graph of every generated file passes structural validation."""
        for plan in generated.files:
            report = validate_tfg(prepare_file(plan.file_id, plan.source, 5000, plan.manifest).tfg)
            assert report.ok, report.findings

    def test_literal_only(self):
        """Test that a literal-only mix restricts labels to literal-expressible types."""
        spec = GenSpec(seed=2, files=4, signal_mix={"literal": 1.0})
        corpus = generate_corpus(spec)

        labels = [label for plan in corpus.files for label in plan.labels]
        assert labels
        assert {label.signal_class for label in labels} == {"literal"}
        assert {label.type for label in labels} <= LITERAL_TYPES


@pytest.mark.unit
class TestGenerateCorpus:
    """Test whole-corpus generation and output."""

    def test_zero_files(self):
        """Test an empty corpus."""
        corpus = generate_corpus(GenSpec(files=0))

        assert corpus.files == []
        assert corpus.manifest()["files"] == {}
        assert label_frequencies(corpus) == {}

    def test_jobs_do_not_change_output(self, small_spec, generated):
        """Test that threaded generation produces the same files."""
        threaded = generate_corpus(small_spec, jobs=3)
        assert [p.source for p in threaded.files] == [p.source for p in generated.files]

    def test_file_ids(self, generated, small_spec):
        """Test sequential zero-padded ids."""
        assert [p.file_id for p in generated.files] == [f"file_{i:05d}.ts" for i in range(small_spec.files)]

    def test_write_corpus(self, corpus_dir, generated, small_spec):
        """Test the files directory and the manifest document."""
        written = sorted(p.name for p in (corpus_dir / "files").iterdir())
        manifest = json.loads((corpus_dir / "manifest.json").read_text(encoding="utf-8"))

        assert written == [p.file_id for p in generated.files]
        assert (corpus_dir / "files" / generated.files[0].file_id).read_text(encoding="utf-8") == generated.files[0].source
        assert GenSpec.from_json(manifest["spec"]) == small_spec
        assert manifest["files"][generated.files[0].file_id] == generated.files[0].manifest

    def test_write_returns_directory(self, generated, tmp_path):
        """Test the returned output path."""
        assert write_corpus(generated, tmp_path / "out") == tmp_path / "out"

    def test_label_frequencies(self, generated):
        """Test that observed frequencies form a distribution over palette types."""
        frequencies = label_frequencies(generated)

        assert sum(frequencies.values()) == pytest.approx(1.0)
        assert set(frequencies) <= set(TYPE_ORDER)
