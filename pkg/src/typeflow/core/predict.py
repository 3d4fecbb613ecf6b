"""Ranked type predictions from logits."""
from typing import List, Optional, Sequence, Tuple

import torch

from ..numeric import ops

Ranked = List[Tuple[str, float]]


def rank_indices(logits: torch.Tensor, k: int) -> Tuple[torch.Tensor, torch.Tensor]:
    """Top-k (probabilities, indices) per row; ties go to the lower vocabulary index."""
    if k < 1:
        raise ValueError("k must be at least 1")
    probs = ops.softmax(logits.detach(), dim=-1)
    values, indices = torch.sort(probs, dim=-1, descending=True, stable=True)
    return values[..., :k], indices[..., :k]


def predict(logits: torch.Tensor, k: int, types: Optional[Sequence[str]] = None) -> Ranked:
    """Softmax one logit vector and return the k most probable (type, probability) pairs."""
    values, indices = rank_indices(logits.reshape(-1), k)
    names = types if types is not None else [str(i) for i in range(logits.numel())]
    return [(names[int(i)], float(p)) for p, i in zip(values, indices)]


def predict_rows(logits: torch.Tensor, k: int, types: Sequence[str]) -> List[Ranked]:
    """predict for every row of a (N, C) logit matrix."""
    if logits.numel() == 0:
        return []
    values, indices = rank_indices(logits, k)
    return [
        [(types[int(i)], float(p)) for p, i in zip(row_values, row_indices)]
        for row_values, row_indices in zip(values.tolist(), indices.tolist())
    ]
