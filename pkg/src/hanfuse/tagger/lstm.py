"""Single-layer bidirectional LSTM with hand-written backpropagation.

Batches are right-padded; the backward direction reverses every sequence
inside its own length, so padding always trails the real steps and never
influences them.  Gate order in the stacked weights is input, forget, cell,
output.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatch


@dataclass
class LstmParams:
    """Weights for both directions, direction-major (index 0 forward, 1 backward).

    W: (2, 4h, d) input weights, U: (2, 4h, h) recurrent weights, b: (2, 4h).
    """

    W: np.ndarray
    U: np.ndarray
    b: np.ndarray

    @property
    def input_dim(self):
        return self.W.shape[2]

    @property
    def hidden(self):
        return self.U.shape[2]

    @classmethod
    def init(cls, input_dim, hidden, rng):
        bound = 1.0 / np.sqrt(hidden)
        return cls(
            rng.uniform(-bound, bound, (2, 4 * hidden, input_dim)),
            rng.uniform(-bound, bound, (2, 4 * hidden, hidden)),
            rng.uniform(-bound, bound, (2, 4 * hidden)),
        )

    @classmethod
    def zeros(cls, input_dim, hidden):
        return cls(
            np.zeros((2, 4 * hidden, input_dim)),
            np.zeros((2, 4 * hidden, hidden)),
            np.zeros((2, 4 * hidden)),
        )


def _sigmoid(x):
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


def reverse_index(lengths, n):
    """Gather index reversing each row inside its length; it is its own inverse."""
    t = np.arange(n)[None, :]
    lengths = np.asarray(lengths)[:, None]
    return np.where(t < lengths, lengths - 1 - t, t)


def _gather(X, idx):
    return np.take_along_axis(X, idx[:, :, None], axis=1)


def _run(X, W, U, b):
    B, n, _ = X.shape
    h_dim = U.shape[1]
    XW = X @ W.T + b
    h = np.zeros((B, h_dim))
    c = np.zeros((B, h_dim))
    H = np.empty((B, n, h_dim))
    cache = []
    for t in range(n):
        z = XW[:, t] + h @ U.T
        i = _sigmoid(z[:, :h_dim])
        f = _sigmoid(z[:, h_dim:2 * h_dim])
        g = np.tanh(z[:, 2 * h_dim:3 * h_dim])
        o = _sigmoid(z[:, 3 * h_dim:])
        c_prev, h_prev = c, h
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        H[:, t] = h
        cache.append((i, f, g, o, c_prev, h_prev, tc))
    return H, cache


def _run_backward(dH, X, W, U, cache):
    B, n, _ = X.shape
    h_dim = U.shape[1]
    dZ = np.empty((B, n, 4 * h_dim))
    dU = np.zeros_like(U)
    dh_next = np.zeros((B, h_dim))
    dc_next = np.zeros((B, h_dim))
    for t in range(n - 1, -1, -1):
        i, f, g, o, c_prev, h_prev, tc = cache[t]
        dh = dH[:, t] + dh_next
        do = dh * tc
        dc = dc_next + dh * o * (1.0 - tc * tc)
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), dg * (1 - g * g), do * o * (1 - o)], axis=1
        )
        dZ[:, t] = dz
        dU += dz.T @ h_prev
        dh_next = dz @ U
        dc_next = dc * f
    flat = dZ.reshape(B * n, -1)
    dW = flat.T @ X.reshape(B * n, -1)
    db = flat.sum(axis=0)
    dX = dZ @ W
    return dX, dW, dU, db


def bilstm_forward(X, lengths, params: LstmParams):
    """Batched forward pass.

    X: (B, n, d) right-padded inputs; returns (H, cache) with H of shape
    (B, n, 2h), forward hidden states first.  Rows past a sequence's length
    are meaningless.
    """
    if X.ndim != 3 or X.shape[2] != params.input_dim:
        raise ShapeMismatch(f"LSTM expects (batch, steps, {params.input_dim}) input, got {X.shape}")
    idx = reverse_index(lengths, X.shape[1])
    Hf, cf = _run(X, params.W[0], params.U[0], params.b[0])
    Xr = _gather(X, idx)
    Hr, cr = _run(Xr, params.W[1], params.U[1], params.b[1])
    Hb = _gather(Hr, idx)
    return np.concatenate([Hf, Hb], axis=2), (X, Xr, idx, cf, cr)


def bilstm_backward(dH, params: LstmParams, cache):
    """Returns (dX, LstmParams-shaped gradients)."""
    X, Xr, idx, cf, cr = cache
    h_dim = params.hidden
    dXf, dWf, dUf, dbf = _run_backward(dH[:, :, :h_dim], X, params.W[0], params.U[0], cf)
    dHr = _gather(dH[:, :, h_dim:], idx)
    dXr, dWb, dUb, dbb = _run_backward(dHr, Xr, params.W[1], params.U[1], cr)
    dX = dXf + _gather(dXr, idx)
    return dX, LstmParams(np.stack([dWf, dWb]), np.stack([dUf, dUb]), np.stack([dbf, dbb]))


def lstm_forward(inputs, params: LstmParams):
    """Single sequence: (n, d) -> (n, 2h), zero initial states."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2:
        raise ShapeMismatch(f"expected an (n, d) matrix, got shape {inputs.shape}")
    H, _ = bilstm_forward(inputs[None], [inputs.shape[0]], params)
    return H[0]
