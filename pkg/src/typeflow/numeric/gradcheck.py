"""Central finite-difference gradient checker."""
from typing import Callable, List, Optional, Sequence

import numpy as np
import torch
from loguru import logger

DENOMINATOR_FLOOR = 1e-8


def grad_check(
    loss_fn: Callable[[], torch.Tensor],
    params: Sequence[torch.Tensor],
    eps: float = 1e-6,
    samples: Optional[int] = 200,
    seed: int = 0,
    grad_fn: Optional[Callable[[], List[torch.Tensor]]] = None,
    min_gradient: float = 0.0,
) -> float:
    """
    Max relative error between analytic and central-difference gradients.

    Args:
        loss_fn: zero-argument closure returning a scalar loss (run in float64)
        params: tensors to perturb in place
        eps: finite-difference step
        samples: number of coordinates to check, drawn uniformly without
            replacement; None checks every coordinate
        seed: coordinate sampling seed
        grad_fn: analytic gradients; defaults to autograd on loss_fn
        min_gradient: only coordinates whose analytic gradient has at least
            this magnitude are eligible for sampling

    Returns:
        max over checked coordinates of |a - n| / max(1e-8, |a| + |n|)
    """
    params = list(params)
    if grad_fn is not None:
        analytic = [g.detach() for g in grad_fn()]
    else:
        grads = torch.autograd.grad(loss_fn(), params, allow_unused=True)
        analytic = [torch.zeros_like(p) if g is None else g.detach() for p, g in zip(params, grads)]

    sizes = [p.numel() for p in params]
    offsets = np.cumsum([0] + sizes)
    flat_analytic = torch.cat([a.reshape(-1) for a in analytic]).cpu().numpy() if params else np.zeros(0)
    eligible = np.flatnonzero(np.abs(flat_analytic) >= min_gradient)
    if samples is None or samples >= len(eligible):
        coordinates = eligible
    else:
        coordinates = np.sort(np.random.default_rng(seed).choice(eligible, size=samples, replace=False))
    if min_gradient > 0:
        logger.debug(f"{len(eligible)} of {len(flat_analytic)} coordinates have |gradient| >= {min_gradient:g}")

    worst = 0.0
    with torch.no_grad():
        for flat in coordinates:
            which = int(np.searchsorted(offsets, flat, side="right") - 1)
            index = int(flat - offsets[which])
            view = params[which].view(-1)
            original = view[index].item()
            view[index] = original + eps
            plus = float(loss_fn())
            view[index] = original - eps
            minus = float(loss_fn())
            view[index] = original
            numeric = (plus - minus) / (2 * eps)
            value = float(flat_analytic[flat])
            error = abs(value - numeric) / max(DENOMINATOR_FLOOR, abs(value) + abs(numeric))
            worst = max(worst, error)

    logger.debug(f"gradient check over {len(coordinates)} coordinates: max relative error {worst:.3e}")
    return worst
