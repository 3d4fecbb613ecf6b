"""Type inference GNN: feature embedding, K rounds of propagation, softmax head."""
from typing import Dict

import torch
import torch.nn as nn
from loguru import logger

from ..models import TfgNodeKind
from ..numeric.initializers import init_module
from .embedding import FeatureEmbedding, IdentInitializer, VocabSizes
from .model_config import ModelConfig
from .propagation import PropagationStep

# integer codes of TFG node kinds in tensorised graphs
NODE_KIND_CODES: Dict[TfgNodeKind, int] = {kind: code for code, kind in enumerate(TfgNodeKind)}
_FROZEN_CODES = (NODE_KIND_CODES[TfgNodeKind.TOK], NODE_KIND_CODES[TfgNodeKind.CTX])


class TypeFlowGNN(nn.Module):
    """
    Predicts a type distribution for every node of a batch of type flow graphs.

    Architecture:
    1. Feature embedding: node features to d_h vectors, edge features to d_e
       vectors, IdentNode states from the configured initialisation scheme
    2. K rounds of message passing (shared parameters when recurrent, one
       step per round when convolutional)
    3. Linear head over the final states; softmax is left to callers
    """

    def __init__(self, config: ModelConfig, sizes: VocabSizes):
        super().__init__()
        self.config = config
        self.sizes = sizes

        self.embedding = FeatureEmbedding(config, sizes)
        self.ident_init = IdentInitializer(config, sizes)
        step_count = 1 if config.recurrent else config.K
        self.steps = nn.ModuleList([PropagationStep(config) for _ in range(step_count)])
        self.head = nn.Linear(config.d_h, config.type_count)

        init_module(self)
        logger.debug(f"built {config.preset} model with {count_parameters(self)} parameters")

    def step(self, k: int) -> PropagationStep:
        """Parameters used in round k (0-based)."""
        return self.steps[0] if self.config.recurrent else self.steps[k]

    def initial_states(self, data) -> torch.Tensor:
        """h^(0): feature embeddings, IdentNode rows replaced by the initialisation scheme."""
        h = self.embedding.embed_nodes(data.x_feat)
        if data.ident_index.numel():
            idents = self.ident_init(data, self.embedding.node_features)
            h = h.index_copy(0, data.ident_index, idents)
        return h

    def propagate(self, data) -> torch.Tensor:
        """Node states after K rounds."""
        h = self.initial_states(data)
        edge_emb = self.embedding.embed_edges(data.edge_attr) if self.config.edge_features else None
        frozen = (data.x_kind == _FROZEN_CODES[0]) | (data.x_kind == _FROZEN_CODES[1])
        for k in range(self.config.K):
            h = self.step(k)(h, data.edge_index, edge_emb, frozen)
        return h

    def forward(self, data) -> torch.Tensor:
        """Logits (num_nodes, type_count) for every node; rows of non-predictable nodes are unused."""
        return self.head(self.propagate(data))


def count_parameters(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


def predictable_mask(data) -> torch.Tensor:
    ident = NODE_KIND_CODES[TfgNodeKind.IDENT]
    expr = NODE_KIND_CODES[TfgNodeKind.EXPR]
    return (data.x_kind == ident) | (data.x_kind == expr)
