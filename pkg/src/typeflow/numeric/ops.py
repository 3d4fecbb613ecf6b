"""Shape-checked differentiable primitives.

Thin wrappers over torch that raise ShapeError (naming both operand shapes)
instead of torch's RuntimeError, so shape bugs surface as typed errors.
"""
from typing import Optional, Sequence

import torch
import torch.nn.functional as F

from ..infrastructure.error_handling import ShapeError

LEAKY_RELU_SLOPE = 0.2


def _broadcast(op: str, a: torch.Tensor, b: torch.Tensor):
    try:
        torch.broadcast_shapes(a.shape, b.shape)
    except RuntimeError:
        raise ShapeError(op, a.shape, b.shape) from None


def matmul(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    inner_b = b.shape[-2] if b.dim() >= 2 else b.shape[0]
    if a.dim() == 0 or b.dim() == 0 or a.shape[-1] != inner_b:
        raise ShapeError("matmul", a.shape, b.shape)
    return torch.matmul(a, b)


def add(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    _broadcast("add", a, b)
    return a + b


def mul(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """Element-wise product."""
    _broadcast("mul", a, b)
    return a * b


def concat(tensors: Sequence[torch.Tensor], dim: int = -1) -> torch.Tensor:
    if not tensors:
        raise ShapeError("concat")
    first = tensors[0]
    axis = dim % first.dim()
    for other in tensors[1:]:
        if other.dim() != first.dim() or any(
            s != o for i, (s, o) in enumerate(zip(first.shape, other.shape)) if i != axis
        ):
            raise ShapeError("concat", first.shape, other.shape)
    return torch.cat(list(tensors), dim=dim)


def leaky_relu(x: torch.Tensor, slope: float = LEAKY_RELU_SLOPE) -> torch.Tensor:
    return F.leaky_relu(x, negative_slope=slope)


def relu(x: torch.Tensor) -> torch.Tensor:
    return torch.relu(x)


def sigmoid(x: torch.Tensor) -> torch.Tensor:
    return torch.sigmoid(x)


def tanh(x: torch.Tensor) -> torch.Tensor:
    return torch.tanh(x)


def softmax(x: torch.Tensor, dim: int = -1) -> torch.Tensor:
    """Softmax stabilised by subtracting the maximum."""
    if x.dim() == 0 or x.shape[dim] == 0:
        raise ShapeError("softmax", x.shape)
    shifted = x - x.amax(dim=dim, keepdim=True).detach()
    exp = torch.exp(shifted)
    return exp / exp.sum(dim=dim, keepdim=True)


def mean(x: torch.Tensor, dim: Optional[int] = None) -> torch.Tensor:
    return x.mean() if dim is None else x.mean(dim=dim)


def sum(x: torch.Tensor, dim: Optional[int] = None) -> torch.Tensor:  # noqa: A001
    return x.sum() if dim is None else x.sum(dim=dim)


def embedding_lookup(table: torch.Tensor, indices: torch.Tensor) -> torch.Tensor:
    """Rows of table at indices."""
    if table.dim() != 2 or indices.dtype not in (torch.int32, torch.int64):
        raise ShapeError("embedding_lookup", table.shape, indices.shape)
    if indices.numel() and (int(indices.min()) < 0 or int(indices.max()) >= table.shape[0]):
        raise ShapeError("embedding_lookup", table.shape, indices.shape)
    return F.embedding(indices, table)


def linear(x: torch.Tensor, weight: torch.Tensor, bias: Optional[torch.Tensor] = None) -> torch.Tensor:
    """x @ weight.T + bias, weight stored (out, in)."""
    if weight.dim() != 2 or x.shape[-1] != weight.shape[1]:
        raise ShapeError("linear", x.shape, weight.shape)
    if bias is not None and bias.shape != (weight.shape[0],):
        raise ShapeError("linear", weight.shape, bias.shape)
    return F.linear(x, weight, bias)
