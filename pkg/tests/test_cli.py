"""Tests for the typeflow command line."""
import json

import pytest
from loguru import logger

from typeflow.cli import build_parser, run
from typeflow.core import TypeFlowGNN, VocabSizes, preset
from typeflow.infrastructure.error_handling import EXIT_DATA, EXIT_OK, EXIT_USAGE
from typeflow.pipeline.checkpoint import Checkpoint, read_checkpoint, write_checkpoint

QUIET = ["--log-level", "WARNING", "--log-dir", ""]


def typeflow(*argv) -> int:
    return run(QUIET + [str(a) for a in argv])


@pytest.fixture(autouse=True)
def detach_log_sinks():
    """Drop the stderr sink bound to pytest's captured stream after each command."""
    yield
    logger.remove()


@pytest.fixture
def checkpoint_path(bundle, small_dims, tmp_path):
    model = TypeFlowGNN(preset("rgnn", type_count=len(bundle.types), **small_dims), VocabSizes.from_bundle(bundle))
    path = tmp_path / "rgnn.tfgm"
    write_checkpoint(Checkpoint.from_model(model, bundle, {"seed": 0}), path)
    return path


@pytest.mark.unit
class TestUsage:
    """Test argument handling and usage exit codes."""

    def test_no_command(self):
        """Test that a subcommand is required."""
        assert run([]) == EXIT_USAGE

    def test_unknown_preset(self, tmp_path):
        """Test a preset name outside the supported set."""
        assert typeflow("grad-check", "--config", "gcn") == EXIT_USAGE

    def test_missing_input(self, tmp_path):
        """Test an input path that does not exist."""
        assert typeflow("extract", "--in", tmp_path / "nope.js", "--out", tmp_path / "out") == EXIT_USAGE

    def test_subcommands(self):
        """Test that every pipeline stage is registered."""
        parser = build_parser()
        for argv in (["gen-corpus", "--out", "x"], ["extract", "--in", "a", "--out", "b"],
                     ["vocab", "build", "--train", "a", "--out", "b"], ["train", "--data", "a", "--out", "b"],
                     ["predict", "--model", "m", "--in", "a"], ["eval", "--model", "m", "--data", "d"],
                     ["bench", "--model", "m", "--data", "d"], ["grad-check"], ["stats", "--data", "d"],
                     ["sweep", "--data", "d", "--out", "o"]):
            assert callable(parser.parse_args(argv).handler)

    def test_bad_ks(self, corpus_dir, tmp_path):
        """Test a malformed K list."""
        assert typeflow("sweep", "--data", corpus_dir, "--out", tmp_path / "s.json", "--ks", "2,x") == EXIT_USAGE


@pytest.mark.integration
class TestCorpusCommands:
    """Test generation, extraction and statistics."""

    def test_gen_corpus(self, tmp_path):
        """Test the requested number of files and the manifest."""
        out = tmp_path / "corpus"
        assert typeflow("gen-corpus", "--seed", 5, "--files", 3, "--out", out) == EXIT_OK

        assert len(list((out / "files").iterdir())) == 3
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["spec"]["seed"] == 5
        assert len(manifest["files"]) == 3

    def test_gen_corpus_bad_spec(self, tmp_path):
        """Test an unsatisfiable spec file."""
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"files": 2, "functions_per_file": [3, 1]}), encoding="utf-8")
        assert typeflow("gen-corpus", "--spec", spec, "--out", tmp_path / "c") == EXIT_DATA

    def test_extract_file(self, golden_dir, tmp_path):
        """Test single-file extraction against the golden graph, with the AST alongside."""
        target = tmp_path / "out" / "running_example.tfg.json"
        code = typeflow("extract", "--in", golden_dir / "running_example.js", "--out", target, "--ast-json")

        assert code == EXIT_OK
        actual = json.loads(target.read_text(encoding="utf-8"))
        expected = json.loads((golden_dir / "running_example.tfg.json").read_text(encoding="utf-8"))
        assert actual["nodes"] == expected["nodes"]
        ast = json.loads((tmp_path / "out" / "running_example.ast.json").read_text(encoding="utf-8"))
        assert ast["kind"] == "Program"

    def test_extract_directory_skips_failures(self, tmp_path):
        """Test that a file that fails to parse does not stop the batch."""
        src = tmp_path / "src"
        src.mkdir()
        (src / "good.js").write_text("let a = 1;\n", encoding="utf-8")
        (src / "bad.js").write_text("let = ;\n", encoding="utf-8")

        assert typeflow("extract", "--in", src, "--out", tmp_path / "graphs") == EXIT_OK
        assert (tmp_path / "graphs" / "good.js.tfg.json").exists()
        assert not (tmp_path / "graphs" / "bad.js.tfg.json").exists()

    def test_extract_ast_json(self, golden_dir, tmp_path):
        """Test that an AST JSON document extracts to the same graph as its source."""
        from_source = tmp_path / "a" / "running_example.tfg.json"
        assert typeflow("extract", "--in", golden_dir / "running_example.js", "--out", from_source,
                        "--ast-json") == EXIT_OK
        from_ast = tmp_path / "b" / "running_example.tfg.json"

        code = typeflow("extract", "--in", tmp_path / "a" / "running_example.ast.json", "--out", from_ast)

        assert code == EXIT_OK
        expected = json.loads(from_source.read_text(encoding="utf-8"))
        actual = json.loads(from_ast.read_text(encoding="utf-8"))
        assert actual["nodes"] == expected["nodes"]
        assert actual["edges"] == expected["edges"]

    def test_extract_ast_json_directory(self, tmp_path):
        """Test that AST JSON documents in a directory are extracted next to sources."""
        src = tmp_path / "src"
        src.mkdir()
        (src / "a.js").write_text("let a = 1;\n", encoding="utf-8")
        assert typeflow("extract", "--in", src / "a.js", "--out", tmp_path / "first", "--ast-json") == EXIT_OK
        (src / "b.ast.json").write_bytes((tmp_path / "first" / "a.js.ast.json").read_bytes())

        assert typeflow("extract", "--in", src, "--out", tmp_path / "graphs") == EXIT_OK
        assert (tmp_path / "graphs" / "a.js.tfg.json").exists()
        assert (tmp_path / "graphs" / "b.ast.json.tfg.json").exists()

    def test_extract_malformed_ast_json(self, tmp_path):
        """Test that a function declaration without a body is a data error."""
        document = {"kind": "Program", "children": [
            {"tag": "body[0]", "node": {"kind": "FunctionDecl", "children": [
                {"tag": "name", "node": {"kind": "Identifier", "name": "f"}}]}}]}
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(document), encoding="utf-8")

        assert typeflow("extract", "--in", path, "--out", tmp_path / "out.json") == EXIT_DATA

    def test_stats(self, corpus_dir, tmp_path):
        """Test per-split size quartiles."""
        out = tmp_path / "stats.json"
        assert typeflow("stats", "--data", corpus_dir, "--json", out) == EXIT_OK

        stats = json.loads(out.read_text(encoding="utf-8"))
        assert set(stats) == {"train", "valid", "test"}
        assert len(stats["train"]["nodes"]) == 5

    def test_vocab_build(self, corpus_dir, tmp_path):
        """Test that vocabularies are written from the training split."""
        out = tmp_path / "vocab"
        assert typeflow("vocab", "build", "--train", corpus_dir, "--out", out, "--merges", 50) == EXIT_OK
        assert (out / "types.json").exists()
        assert (out / "bpe.json").exists()


@pytest.mark.integration
class TestModelCommands:
    """Test commands that load checkpoints."""

    def test_predict(self, checkpoint_path, generated, tmp_path, capsys):
        """Test ranked types for every identifier, in source order."""
        source = tmp_path / "input.ts"
        source.write_text(generated.files[0].source, encoding="utf-8")

        assert typeflow("predict", "--model", checkpoint_path, "--in", source, "--topk", 3) == EXIT_OK
        document = json.loads(capsys.readouterr().out)

        assert document["file"] == "input.ts"
        spans = [tuple(r["span"]) for r in document["identifiers"]]
        assert spans == sorted(spans)
        for record in document["identifiers"]:
            probabilities = [p["probability"] for p in record["predictions"]]
            assert len(probabilities) == 3
            assert probabilities == sorted(probabilities, reverse=True)

    def test_predict_corrupt_checkpoint(self, tmp_path, golden_dir):
        """Test a checkpoint file with a bad header."""
        broken = tmp_path / "broken.tfgm"
        broken.write_bytes(b"junk")
        assert typeflow("predict", "--model", broken, "--in", golden_dir / "running_example.js") == EXIT_DATA

    def test_eval(self, checkpoint_path, corpus_dir, tmp_path):
        """Test the JSON report of one checkpoint."""
        out = tmp_path / "eval.json"
        assert typeflow("eval", "--model", checkpoint_path, "--data", corpus_dir, "--split", "train",
                        "--json", out, "--plot", tmp_path / "eval.svg") == EXIT_OK

        reports = json.loads(out.read_text(encoding="utf-8"))
        assert len(reports) == 1
        assert reports[0]["model"]["preset"] == "rgnn"
        assert reports[0]["all"]["count"] > 0
        assert (tmp_path / "eval.svg").exists()

    def test_bench(self, checkpoint_path, corpus_dir, tmp_path):
        """Test a one-repeat benchmark."""
        out = tmp_path / "bench.json"
        assert typeflow("bench", "--model", checkpoint_path, "--data", corpus_dir, "--split", "train",
                        "--repeats", 1, "--batch", 4, "--json", out) == EXIT_OK
        assert json.loads(out.read_text(encoding="utf-8"))[0]["files"] > 0

    def test_grad_check(self, capsys):
        """Test one preset's gradient check."""
        assert typeflow("grad-check", "--config", "rgnn", "--samples", 30) == EXIT_OK
        line = json.loads(capsys.readouterr().out.strip())
        assert line["config"] == "rgnn"
        assert line["max_relative_error"] < 1e-5


@pytest.mark.slow
class TestTrainCommand:
    """Test training from the command line."""

    def test_train(self, corpus_dir, tmp_path):
        """Test that a short run writes a loadable checkpoint and a training log."""
        out = tmp_path / "model.tfgm"
        code = typeflow("train", "--data", corpus_dir, "--config", "rgnn", "--K", 2,
                        "--epochs", 1, "--batch", 4, "--out", out)

        assert code == EXIT_OK
        checkpoint = read_checkpoint(out)
        assert checkpoint.config.K == 2
        assert out.with_suffix(".train.jsonl").exists()
