"""End-to-end gradient check of a model preset on a tiny generated batch."""
from dataclasses import dataclass
from typing import List

import torch
from loguru import logger

from ..config import VocabConfig
from ..core.embedding import VocabSizes
from ..core.gnn import TypeFlowGNN
from ..core.model_config import ModelConfig, preset
from ..corpus.generator import GenSpec, generate_file
from ..numeric.gradcheck import grad_check
from ..numeric.initializers import seed_everything
from ..numeric.loss import cross_entropy
from ..vocab.vocabulary import VocabularyBundle
from .dataset import build_vocabularies, index_example, prepare_file
from .tensorize import collate, tensorize

# small dimensions keep finite differences cheap
TINY_DIMS = dict(K=2, d_h=6, d_e=5, d_seg=4, d_seg_rnn=3, d_ctx_rnn=4, d_name=5)

# central differences of a float64 loss carry ~1e-9 absolute noise; smaller gradients are not sampled
MIN_CHECKED_GRADIENT = 1e-3


@dataclass
class TinyProblem:
    config: ModelConfig
    bundle: VocabularyBundle
    batch: object


def tiny_problem(preset_name: str, seed: int = 0, files: int = 2) -> TinyProblem:
    """A packed batch of a few small generated files with vocabularies built from them."""
    spec = GenSpec(seed=seed, files=files, functions_per_file=(1, 1), statements_per_function=(2, 3))
    examples = []
    for i in range(files):
        plan = generate_file(spec, i)
        examples.append(prepare_file(plan.file_id, plan.source))
    bundle = build_vocabularies(examples, VocabConfig(max_names=1000, bpe_merges=50, max_types=100))
    config = preset(preset_name, type_count=len(bundle.types), **TINY_DIMS)
    graphs = [tensorize(index_example(e, bundle), bundle, config.contextual_layer) for e in examples]
    return TinyProblem(config, bundle, collate(graphs))


def model_grad_check(preset_name: str, seed: int = 0, samples: int = 200, eps: float = 1e-6) -> float:
    """Max relative error of end-to-end loss gradients against central differences (float64)."""
    seed_everything(seed)
    problem = tiny_problem(preset_name, seed)
    model = TypeFlowGNN(problem.config, VocabSizes.from_bundle(problem.bundle)).double()
    mask = problem.batch.y >= 0
    labels = problem.batch.y[mask]

    def loss_fn() -> torch.Tensor:
        return cross_entropy(model(problem.batch)[mask], labels)

    params: List[torch.nn.Parameter] = list(model.parameters())
    error = grad_check(loss_fn, params, eps=eps, samples=samples, seed=seed, min_gradient=MIN_CHECKED_GRADIENT)
    logger.info(f"{preset_name}: max relative gradient error {error:.3e} over {samples} coordinates")
    return error
