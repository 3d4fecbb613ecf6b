"""One round of message passing: message, aggregate, update."""
from typing import Optional

import torch
import torch.nn as nn
from torch_geometric.utils import scatter, softmax

from ..infrastructure.error_handling import ShapeError
from ..numeric import ops
from ..numeric.initializers import init_vector
from ..numeric.rnn import GRUCell
from .model_config import ModelConfig


class PropagationStep(nn.Module):
    """
    Parameters of one propagation step.

    Recurrent models share a single step across all K rounds; convolutional
    models own K of them.
    """

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        d_h, d_e = config.d_h, config.d_e
        if config.edge_features:
            self.w_mi = nn.Linear(d_h, d_e)
            self.w_mo = nn.Linear(d_e, d_h)
        if config.attention:
            self.w_qk = nn.Linear(d_h, d_h, bias=False)
            self.w_v = nn.Linear(d_h, d_h, bias=False)
            self.attn_vector = nn.Parameter(torch.empty(2 * d_h))
            init_vector(self.attn_vector, 2 * d_h)
        if config.recurrent:
            self.gru = GRUCell(d_h, d_h)
        else:
            self.w_h = nn.Linear(d_h, d_h)

    def message(self, h_src: torch.Tensor, edge_emb: Optional[torch.Tensor]) -> torch.Tensor:
        """W_MO((W_MI h_u + b_MI) * e_uv) + b_MO with edge features, h_u otherwise."""
        if not self.config.edge_features:
            return h_src
        if edge_emb is None or edge_emb.shape[0] != h_src.shape[0]:
            raise ShapeError("message", h_src.shape, () if edge_emb is None else edge_emb.shape)
        return self.w_mo(ops.mul(self.w_mi(h_src), edge_emb))

    def attention_weights(self, h: torch.Tensor, messages: torch.Tensor, dst: torch.Tensor) -> torch.Tensor:
        """Softmax over each destination's in-messages of LeakyReLU(w . [W_QK h_v ; W_QK m_uv])."""
        query = self.w_qk(h).index_select(0, dst)
        key = self.w_qk(messages)
        scores = ops.leaky_relu(ops.concat([query, key], dim=-1) @ self.attn_vector)
        return softmax(scores, dst, num_nodes=h.size(0))

    def aggregate(self, h: torch.Tensor, messages: torch.Tensor, dst: torch.Tensor) -> torch.Tensor:
        num_nodes = h.size(0)
        if self.config.attention:
            alpha = self.attention_weights(h, messages, dst)
            weighted = alpha.unsqueeze(-1) * self.w_v(messages)
            return scatter(weighted, dst, dim=0, dim_size=num_nodes, reduce="sum")
        # nodes without in-edges aggregate to zero
        return scatter(messages, dst, dim=0, dim_size=num_nodes, reduce="mean")

    def update(self, h: torch.Tensor, aggregated: torch.Tensor, frozen: torch.Tensor) -> torch.Tensor:
        """GRU(a_v, h_v) or ReLU(W_h a_v + b); frozen (TokNode/CtxNode) rows keep h_v."""
        if self.config.recurrent:
            new = self.gru(aggregated, h)
        else:
            new = ops.relu(self.w_h(aggregated))
        return torch.where(frozen.unsqueeze(-1), h, new)

    def forward(
        self,
        h: torch.Tensor,
        edge_index: torch.Tensor,
        edge_emb: Optional[torch.Tensor],
        frozen: torch.Tensor,
    ) -> torch.Tensor:
        src, dst = edge_index
        messages = self.message(h.index_select(0, src), edge_emb)
        aggregated = self.aggregate(h, messages, dst)
        return self.update(h, aggregated, frozen)
