"""Parameter initialisation and run determinism."""
import math
import random

import numpy as np
import torch
import torch.nn as nn


def seed_everything(seed: int):
    """Seed every RNG and pin torch to deterministic single-threaded kernels."""
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)
    torch.set_num_threads(1)


def init_linear(layer: nn.Linear):
    """uniform(+-1/sqrt(fan_in)) weights, zero bias."""
    bound = 1.0 / math.sqrt(layer.in_features)
    nn.init.uniform_(layer.weight, -bound, bound)
    if layer.bias is not None:
        nn.init.zeros_(layer.bias)


def init_embedding(table: nn.Embedding):
    nn.init.normal_(table.weight, mean=0.0, std=1.0 / math.sqrt(table.embedding_dim))


def init_vector(vector: nn.Parameter, fan_in: int):
    bound = 1.0 / math.sqrt(fan_in)
    nn.init.uniform_(vector, -bound, bound)


def init_module(module: nn.Module):
    """Apply the initialisation scheme to every Linear and Embedding below module."""
    for sub in module.modules():
        if isinstance(sub, nn.Linear):
            init_linear(sub)
        elif isinstance(sub, nn.Embedding):
            init_embedding(sub)
