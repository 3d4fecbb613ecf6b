"""AdamW with decoupled weight decay."""
from typing import Iterable, List, Optional, Sequence, Tuple

import torch

from ..infrastructure.error_handling import ShapeError


def make_optimizer(
    params: Iterable[torch.nn.Parameter],
    lr: float = 1e-3,
    weight_decay: float = 0.01,
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> torch.optim.AdamW:
    """AdamW: bias-corrected moments, weight decay applied multiplicatively before the Adam update."""
    return torch.optim.AdamW(params, lr=lr, betas=betas, eps=eps, weight_decay=weight_decay)


def adamw_step(
    params: Sequence[torch.nn.Parameter],
    grads: Sequence[Optional[torch.Tensor]],
    optimizer: torch.optim.AdamW,
):
    """Install grads on params and take one optimizer step."""
    if len(params) != len(grads):
        raise ShapeError("adamw_step", (len(params),), (len(grads),))
    for param, grad in zip(params, grads):
        if grad is None:
            param.grad = None
            continue
        if grad.shape != param.shape:
            raise ShapeError("adamw_step", param.shape, grad.shape)
        param.grad = grad.detach().clone()
    optimizer.step()


def moment_shapes(optimizer: torch.optim.AdamW) -> List[Tuple[torch.Size, torch.Size, torch.Size]]:
    """(param, first moment, second moment) shapes for every stepped parameter."""
    shapes = []
    for group in optimizer.param_groups:
        for param in group["params"]:
            state = optimizer.state.get(param)
            if state:
                shapes.append((param.shape, state["exp_avg"].shape, state["exp_avg_sq"].shape))
    return shapes
