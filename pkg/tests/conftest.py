"""Shared fixtures for the typeflow test suite."""
from pathlib import Path

import numpy as np
import pytest
import torch

from typeflow.config import VocabConfig
from typeflow.corpus.generator import GenSpec, generate_corpus, write_corpus
from typeflow.numeric.initializers import seed_everything
from typeflow.pipeline.dataset import build_vocabularies, index_example, prepare_file

GOLDEN_DIR = Path(__file__).parent / "golden"

SMALL_VOCAB = VocabConfig(max_names=1000, bpe_merges=100, max_types=100)


@pytest.fixture(autouse=True)
def deterministic():
    """Seed every test the same way and restore torch's thread count afterwards."""
    threads = torch.get_num_threads()
    seed_everything(0)
    yield
    torch.set_num_threads(threads)


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture
def running_example() -> str:
    """Source of the foo/a.val/x/r/c example."""
    return (GOLDEN_DIR / "running_example.js").read_text(encoding="utf-8")


@pytest.fixture
def small_dims() -> dict:
    """Model dimensions small enough for fast tests."""
    return dict(K=2, d_h=8, d_e=6, d_seg=4, d_seg_rnn=4, d_ctx_rnn=5, d_name=7)


@pytest.fixture(scope="session")
def small_spec() -> GenSpec:
    return GenSpec(seed=7, files=12, functions_per_file=(1, 2), statements_per_function=(3, 5))


@pytest.fixture(scope="session")
def generated(small_spec):
    """A small generated corpus kept in memory."""
    return generate_corpus(small_spec)


@pytest.fixture
def corpus_dir(generated, tmp_path) -> Path:
    """The generated corpus written to disk."""
    return write_corpus(generated, tmp_path / "corpus")


@pytest.fixture(scope="session")
def examples(generated):
    """Prepared examples of the generated corpus (labels still type strings)."""
    return [prepare_file(plan.file_id, plan.source, 5000, plan.manifest) for plan in generated.files]


@pytest.fixture(scope="session")
def bundle(examples):
    return build_vocabularies(examples, SMALL_VOCAB)


@pytest.fixture
def indexed(generated, bundle):
    """Freshly prepared and indexed examples; tests may mutate them."""
    return [
        index_example(prepare_file(plan.file_id, plan.source, 5000, plan.manifest), bundle)
        for plan in generated.files
    ]


def _numpy_gru(cell, x: np.ndarray, h: np.ndarray) -> np.ndarray:
    hidden = cell.hidden_size
    w = cell.input_weights.weight.detach().numpy()
    b = cell.input_weights.bias.detach().numpy()
    u_zr = cell.state_gates.weight.detach().numpy()
    u_n = cell.state_candidate.weight.detach().numpy()

    i = x @ w.T + b
    g = h @ u_zr.T
    z = _sigmoid(i[..., :hidden] + g[..., :hidden])
    r = _sigmoid(i[..., hidden:2 * hidden] + g[..., hidden:])
    n = np.tanh(i[..., 2 * hidden:] + (r * h) @ u_n.T)
    return (1 - z) * h + z * n


def _sigmoid(v: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-v))


@pytest.fixture
def reference_gru():
    """Numpy GRU step with the reset gate applied before the candidate transform."""
    return _numpy_gru
