"""Feature embedding and IdentNode state initialisation."""
from dataclasses import dataclass

import torch
import torch.nn as nn
from torch_geometric.utils import to_dense_batch

from ..infrastructure.error_handling import MissingToken
from ..numeric.rnn import BiRNN
from .model_config import ModelConfig


@dataclass(frozen=True)
class VocabSizes:
    """Table sizes a model is built for."""
    names: int
    segments: int
    node_features: int
    edge_features: int

    @classmethod
    def from_bundle(cls, bundle) -> "VocabSizes":
        return cls(len(bundle.names), len(bundle.segments), len(bundle.node_features), len(bundle.edge_features))


class FeatureEmbedding(nn.Module):
    """Lookup tables for non-name node features (d_h) and edge features (d_e)."""

    def __init__(self, config: ModelConfig, sizes: VocabSizes):
        super().__init__()
        self.node_features = nn.Embedding(sizes.node_features, config.d_h)
        self.edge_features = nn.Embedding(sizes.edge_features, config.d_e) if config.edge_features else None

    def embed_nodes(self, feature_ids: torch.Tensor) -> torch.Tensor:
        return self.node_features(feature_ids)

    def embed_edges(self, feature_ids: torch.Tensor) -> torch.Tensor:
        if self.edge_features is None:
            raise RuntimeError("edge embedding requested from a model without edge features")
        return self.edge_features(feature_ids)


class IdentInitializer(nn.Module):
    """
    Initial IdentNode states under one of four schemes:

    - base: name embedding lookup
    - name segmentation: segment embeddings through a bi-GRU
    - contextual layer: the file's token sequence through a bi-GRU, read at
      identifier positions (identifier tokens use the name encoding)
    - both: segmentation feeding the contextual layer
    """

    def __init__(self, config: ModelConfig, sizes: VocabSizes):
        super().__init__()
        self.config = config
        if config.name_segmentation:
            self.segments = nn.Embedding(sizes.segments, config.d_seg)
            self.segment_rnn = BiRNN(config.d_seg, config.d_seg_rnn, config.d_h)
        else:
            self.names = nn.Embedding(sizes.names, config.d_name)
            self.name_projection = nn.Linear(config.d_name, config.d_h) if config.d_name != config.d_h else None
        if config.contextual_layer:
            self.context_rnn = BiRNN(config.d_h, config.d_ctx_rnn, config.d_h)

    def name_states(self, data) -> torch.Tensor:
        """One d_h vector per IdentNode from its name alone."""
        if self.config.name_segmentation:
            idents = data.ident_index.size(0)
            if idents == 0:
                return self.segments.weight.new_zeros(0, self.config.d_h)
            embedded = self.segments(data.seg_ids)
            dense, mask = to_dense_batch(embedded, data.seg_owner, batch_size=idents)
            return self.segment_rnn.summarize(dense, mask)
        states = self.names(data.x_name[data.ident_index])
        return self.name_projection(states) if self.name_projection is not None else states

    def forward(self, data, token_table: nn.Embedding) -> torch.Tensor:
        names = self.name_states(data)
        if not self.config.contextual_layer or names.size(0) == 0:
            return names
        if data.tok_feat.size(0) == 0:
            raise MissingToken("contextual layer needs the token sequence of every file")

        tokens = token_table(data.tok_feat)
        ident_rows = names.index_select(0, data.tok_ident.clamp(0, names.size(0) - 1))
        tokens = torch.where(data.tok_is_ident.unsqueeze(-1), ident_rows, tokens)

        dense, mask = to_dense_batch(tokens, data.tok_feat_batch, batch_size=data.num_graphs)
        contextual = self.context_rnn.encode(dense, mask)[mask]
        return contextual.index_select(0, data.ident_token)
