"""Conversion of prepared files into torch_geometric graphs and packed batches."""
from typing import List, Sequence

import torch
from torch_geometric.data import Batch, Data

from ..core.gnn import NODE_KIND_CODES
from ..infrastructure.error_handling import MissingToken
from ..models import Example, TfgNodeKind, TokenKind
from ..vocab.vocabulary import VocabularyBundle

UNLABELED = -1


class TfgData(Data):
    """
    One tensorised TFG.

    Per node: x_kind, x_feat (node-feature index), x_name (name index, IdentNodes),
    y (type index or -1). Per IdentNode: ident_index (node id), ident_token
    (token position), segments in seg_ids/seg_owner. Per token: tok_feat,
    tok_is_ident, tok_ident (IdentNode ordinal for identifier tokens).
    """

    def __inc__(self, key, value, *args, **kwargs):
        if key == "ident_index":
            return self.num_nodes
        if key in ("seg_owner", "tok_ident"):
            return self.ident_index.size(0)
        if key == "ident_token":
            return self.tok_feat.size(0)
        return super().__inc__(key, value, *args, **kwargs)


def _long(values) -> torch.Tensor:
    return torch.tensor(values, dtype=torch.long)


def tensorize(example: Example, bundle: VocabularyBundle, contextual: bool = False) -> TfgData:
    """
    Index every feature of an example against the vocabularies.

    Raises MissingVocabEntry for an out-of-vocabulary node or edge feature and,
    when contextual, MissingToken for an IdentNode without a token.
    """
    graph = example.tfg
    ident_kind = TfgNodeKind.IDENT

    x_kind, x_feat, x_name, idents = [], [], [], []
    for node in graph.nodes:
        x_kind.append(NODE_KIND_CODES[node.kind])
        if node.kind is ident_kind:
            idents.append(node.id)
            x_feat.append(0)
            x_name.append(bundle.names.index(node.feature))
        else:
            x_feat.append(bundle.node_features.index(node.feature))
            x_name.append(0)

    seg_ids, seg_owner = [], []
    for ordinal, node_id in enumerate(idents):
        for segment in bundle.bpe.encode_name(graph.nodes[node_id].feature):
            seg_ids.append(bundle.segments.index(segment))
            seg_owner.append(ordinal)

    tok_feat, tok_is_ident, tok_ident, ident_token = [], [], [], []
    if contextual:
        ordinal_of_token = {}
        for ordinal, node_id in enumerate(idents):
            position = example.ident_tokens.get(node_id)
            if position is None:
                raise MissingToken(f"{example.file_id}: IdentNode {node_id} has no token")
            ordinal_of_token[position] = ordinal
            ident_token.append(position)
        for position, token in enumerate(example.tokens):
            if token.kind is TokenKind.IDENTIFIER:
                if position not in ordinal_of_token:
                    raise MissingToken(f"{example.file_id}: identifier token at {token.span} has no IdentNode")
                tok_feat.append(0)
                tok_is_ident.append(True)
                tok_ident.append(ordinal_of_token[position])
            else:
                tok_feat.append(bundle.node_features.index(token.feature))
                tok_is_ident.append(False)
                tok_ident.append(0)

    edge_index = _long([[e.src for e in graph.edges], [e.dst for e in graph.edges]])
    edge_attr = _long([bundle.edge_features.index(e.feature) for e in graph.edges])

    y = [UNLABELED] * len(graph.nodes)
    for node_id, type_index in example.labels.items():
        y[node_id] = type_index

    data = TfgData(
        x_kind=_long(x_kind),
        x_feat=_long(x_feat),
        x_name=_long(x_name),
        ident_index=_long(idents),
        ident_token=_long(ident_token),
        seg_ids=_long(seg_ids),
        seg_owner=_long(seg_owner),
        tok_feat=_long(tok_feat),
        tok_is_ident=torch.tensor(tok_is_ident, dtype=torch.bool),
        tok_ident=_long(tok_ident),
        edge_index=edge_index.reshape(2, -1),
        edge_attr=edge_attr,
        y=_long(y),
    )
    data.num_nodes = len(graph.nodes)
    data.file_id = example.file_id
    return data


def collate(graphs: Sequence[TfgData]) -> Batch:
    """Pack graphs into one disjoint-union batch."""
    return Batch.from_data_list(list(graphs), follow_batch=["tok_feat"])


def chunk(items: Sequence, size: int) -> List[List]:
    return [list(items[i:i + size]) for i in range(0, len(items), size)]
