"""Long-running end-to-end checks on generated corpora. Run with ``pytest -m slow``."""
import pytest
import torch

from typeflow.config import TrainingConfig, VocabConfig
from typeflow.core import TypeFlowGNN, VocabSizes, preset
from typeflow.core.model_config import PRESET_NAMES
from typeflow.corpus.generator import GenSpec, generate_corpus
from typeflow.graph.validation import validate_tfg
from typeflow.monitoring import evaluate_model
from typeflow.pipeline.checkpoint import save_checkpoint
from typeflow.pipeline.dataset import Corpus, SourceFile, assemble, build_vocabularies, index_example, prepare_file
from typeflow.pipeline.diagnostics import model_grad_check
from typeflow.pipeline.tensorize import tensorize
from typeflow.pipeline.trainer import Trainer, train

VOCAB = VocabConfig(max_names=10000, bpe_merges=1000, max_types=100)


def corpus_of(spec: GenSpec) -> Corpus:
    generated = generate_corpus(spec)
    return Corpus([SourceFile(p.file_id, p.source) for p in generated.files],
                  {p.file_id: p.manifest for p in generated.files})


@pytest.mark.slow
class TestGeneratedGraphs:
    """Test extraction over a large generated corpus."""

    def test_thousand_files_validate(self):
        """Test that 1000 generated files all extract to valid graphs."""
        generated = generate_corpus(GenSpec(seed=11, files=1000), jobs=4)
        failures = []
        for plan in generated.files:
            report = validate_tfg(prepare_file(plan.file_id, plan.source, None, plan.manifest).tfg)
            if not report.ok:
                failures.append((plan.file_id, report.findings[:3]))

        assert failures == []


@pytest.mark.slow
class TestGradientsAtFullSample:
    """Test end-to-end gradients over 200 sampled coordinates."""

    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_preset(self, name):
        """Test each preset against central differences."""
        assert model_grad_check(name, seed=1, samples=200) <= 1e-5


@pytest.mark.slow
@pytest.mark.gnn
class TestLearning:
    """Test that the recurrent model memorises and generalises."""

    def test_overfit_four_files(self):
        """Test near-perfect training accuracy on one fixed batch of four files."""
        spec = GenSpec(seed=3, files=4, functions_per_file=(1, 2), statements_per_function=(3, 5))
        examples = [prepare_file(p.file_id, p.source, 5000, p.manifest) for p in generate_corpus(spec).files]
        bundle = build_vocabularies(examples, VOCAB)
        graphs = [tensorize(index_example(e, bundle), bundle) for e in examples]

        model = TypeFlowGNN(preset("rgnn", K=4, type_count=len(bundle.types)), VocabSizes.from_bundle(bundle))
        trainer = Trainer(model, TrainingConfig(learning_rate=1e-3, batch_size=4, seed=0), show_progress=False)
        trainer.train_steps(graphs, 500)

        _, top1, _ = trainer.evaluate(graphs).summary()
        assert top1 >= 0.99

    def test_generalises_to_held_out_files(self):
        """Test held-out accuracy on literal-determined labels and overall."""
        spec = GenSpec(seed=21, files=500, signal_mix={"literal": 0.5, "property": 0.25, "call": 0.25})
        splits, bundle, split = assemble(corpus_of(spec), (0.7, 0.1, 0.2), seed=0, vocab_config=VOCAB)
        assert len(split.test) == 100

        training = TrainingConfig(epochs=30, batch_size=32, learning_rate=1e-3, seed=0)
        checkpoint = train(preset("rgnn", K=8), splits, bundle, training, show_progress=False)
        report = evaluate_model(checkpoint.build_model(), splits.test, bundle)

        assert report.by_signal["literal"].top1 >= 0.90
        assert report.all.top1 >= 0.75


@pytest.mark.slow
class TestDeterminism:
    """Test bit-identical results from identical seeds."""

    def test_two_runs_match(self):
        """Test checkpoints and metric reports across two single-threaded runs."""
        torch.set_num_threads(1)
        spec = GenSpec(seed=5, files=20, functions_per_file=(1, 2), statements_per_function=(3, 5))
        training = TrainingConfig(epochs=2, batch_size=8, seed=4)

        runs = []
        for _ in range(2):
            splits, bundle, _ = assemble(corpus_of(spec), (0.8, 0.1, 0.1), seed=0, vocab_config=VOCAB)
            dims = dict(K=2, d_h=16, d_e=16, d_seg=8, d_seg_rnn=8, d_ctx_rnn=8, d_name=8)
            checkpoint = train(preset("rgnn-ns-ctx", **dims), splits, bundle, training, show_progress=False)
            report = evaluate_model(checkpoint.build_model(), splits.test, bundle)
            runs.append((save_checkpoint(checkpoint), report.to_dict()))

        assert runs[0][0] == runs[1][0]
        assert runs[0][1] == runs[1][1]
