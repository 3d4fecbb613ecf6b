"""Differentiable numeric core."""
from .gradcheck import grad_check
from .initializers import init_module, seed_everything
from .loss import cross_entropy, log_softmax
from .optim import adamw_step, make_optimizer
from .rnn import BiRNN, GRUCell, birnn_encode, gru_cell

__all__ = [
    "BiRNN",
    "GRUCell",
    "adamw_step",
    "birnn_encode",
    "cross_entropy",
    "grad_check",
    "gru_cell",
    "init_module",
    "log_softmax",
    "make_optimizer",
    "seed_everything",
]
