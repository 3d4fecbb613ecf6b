"""GRU cell and masked bi-directional GRU encoder."""
from typing import List, Optional, Sequence

import torch
import torch.nn as nn

from ..infrastructure.error_handling import EmptySequence, ShapeError
from . import ops


class GRUCell(nn.Module):
    """
    Gated recurrent unit with the reset gate applied to the state before the
    candidate transform:

        z = sigmoid(W_z x + U_z h + b_z)
        r = sigmoid(W_r x + U_r h + b_r)
        n = tanh(W_n x + U_n (r * h) + b_n)
        h' = (1 - z) * h + z * n
    """

    def __init__(self, input_size: int, hidden_size: int):
        super().__init__()
        self.input_size = input_size
        self.hidden_size = hidden_size
        # [z | r | n] input transforms plus the three biases
        self.input_weights = nn.Linear(input_size, 3 * hidden_size)
        self.state_gates = nn.Linear(hidden_size, 2 * hidden_size, bias=False)
        self.state_candidate = nn.Linear(hidden_size, hidden_size, bias=False)

    def forward(self, inputs: torch.Tensor, state: torch.Tensor) -> torch.Tensor:
        return gru_cell(inputs, state, self)


def gru_cell(inputs: torch.Tensor, state: torch.Tensor, params: GRUCell) -> torch.Tensor:
    """One GRU step; inputs (..., input_size), state (..., hidden_size)."""
    hidden = params.hidden_size
    if inputs.shape[-1] != params.input_size or state.shape[-1] != hidden or inputs.shape[:-1] != state.shape[:-1]:
        raise ShapeError("gru_cell", inputs.shape, state.shape)
    i_z, i_r, i_n = params.input_weights(inputs).split(hidden, dim=-1)
    h_z, h_r = params.state_gates(state).split(hidden, dim=-1)
    z = ops.sigmoid(i_z + h_z)
    r = ops.sigmoid(i_r + h_r)
    n = ops.tanh(i_n + params.state_candidate(r * state))
    return (1 - z) * state + z * n


class BiRNN(nn.Module):
    """
    Bi-directional GRU over padded batches.

    Sequences are left-aligned; mask marks valid positions. The backward
    direction starts from each sequence's own last valid position.
    """

    def __init__(self, input_size: int, hidden_size: int, output_size: Optional[int] = None):
        super().__init__()
        self.hidden_size = hidden_size
        self.forward_cell = GRUCell(input_size, hidden_size)
        self.backward_cell = GRUCell(input_size, hidden_size)
        self.projection = nn.Linear(2 * hidden_size, output_size) if output_size else None

    def run(self, inputs: torch.Tensor, mask: Optional[torch.Tensor] = None):
        """Forward and backward hidden states, each (B, T, H)."""
        if inputs.dim() != 3:
            raise ShapeError("birnn", inputs.shape)
        batch, steps, _ = inputs.shape
        if steps == 0 or batch == 0:
            raise EmptySequence("bi-directional RNN over an empty sequence")
        if mask is None:
            mask = torch.ones(batch, steps, dtype=torch.bool, device=inputs.device)
        elif mask.shape != (batch, steps):
            raise ShapeError("birnn mask", inputs.shape, mask.shape)
        valid = mask.unsqueeze(-1)

        state = inputs.new_zeros(batch, self.hidden_size)
        forward_states: List[torch.Tensor] = []
        for t in range(steps):
            state = torch.where(valid[:, t], self.forward_cell(inputs[:, t], state), state)
            forward_states.append(state)

        state = inputs.new_zeros(batch, self.hidden_size)
        backward_states: List[torch.Tensor] = [state] * steps
        for t in reversed(range(steps)):
            state = torch.where(valid[:, t], self.backward_cell(inputs[:, t], state), state)
            backward_states[t] = state

        return torch.stack(forward_states, dim=1), torch.stack(backward_states, dim=1)

    def states(self, inputs: torch.Tensor, mask: Optional[torch.Tensor] = None) -> torch.Tensor:
        """Per-position [forward ; backward] states, (B, T, 2H)."""
        forward, backward = self.run(inputs, mask)
        return ops.concat([forward, backward], dim=-1)

    def encode(self, inputs: torch.Tensor, mask: Optional[torch.Tensor] = None) -> torch.Tensor:
        """Projected per-position outputs."""
        states = self.states(inputs, mask)
        return self.projection(states) if self.projection is not None else states

    def summarize(self, inputs: torch.Tensor, mask: Optional[torch.Tensor] = None) -> torch.Tensor:
        """One vector per sequence: [last forward state ; first backward state], projected."""
        forward, backward = self.run(inputs, mask)
        if mask is None:
            last = torch.full((inputs.shape[0],), inputs.shape[1] - 1, dtype=torch.long)
        else:
            last = mask.long().sum(dim=1).clamp(min=1) - 1
        rows = torch.arange(inputs.shape[0], device=inputs.device)
        summary = ops.concat([forward[rows, last], backward[:, 0]], dim=-1)
        return self.projection(summary) if self.projection is not None else summary


def birnn_encode(inputs: Sequence[torch.Tensor], rnn: BiRNN) -> List[torch.Tensor]:
    """Encode one sequence of vectors; returns one output vector per position."""
    if len(inputs) == 0:
        raise EmptySequence("bi-directional RNN over an empty sequence")
    outputs = rnn.encode(torch.stack(list(inputs)).unsqueeze(0))
    return list(outputs.squeeze(0).unbind(0))
