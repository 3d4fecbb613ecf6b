"""Classification loss."""
from typing import Union

import torch

from ..infrastructure.error_handling import LabelOutOfRange, ShapeError


def log_softmax(logits: torch.Tensor, dim: int = -1) -> torch.Tensor:
    return logits - torch.logsumexp(logits, dim=dim, keepdim=True)


def cross_entropy(logits: torch.Tensor, labels: Union[int, torch.Tensor]) -> torch.Tensor:
    """
    Mean of -log softmax(logits)[label].

    Accepts a single logit vector (C,) with an int label or a batch (N, C)
    with a label tensor (N,).
    """
    if logits.dim() == 1:
        logits = logits.unsqueeze(0)
    labels = torch.as_tensor(labels, dtype=torch.long, device=logits.device).reshape(-1)
    if logits.dim() != 2 or labels.shape[0] != logits.shape[0]:
        raise ShapeError("cross_entropy", logits.shape, labels.shape)
    classes = logits.shape[1]
    if labels.numel() and (int(labels.min()) < 0 or int(labels.max()) >= classes):
        bad = labels[(labels < 0) | (labels >= classes)][0].item()
        raise LabelOutOfRange(f"label {bad} outside [0, {classes})")
    picked = log_softmax(logits).gather(1, labels.unsqueeze(1)).squeeze(1)
    return -picked.mean()
