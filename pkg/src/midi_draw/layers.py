"""Recurrent and affine primitives with hand-written reverse-mode gradients.

Everything here is functional: a step takes weight arrays plus state and
returns new state along with the cache the matching backward step needs.
Gate layout inside the fused 4H axis is [input, forget, candidate, output];
computations stay in whatever dtype the weights carry (float32 during
training, float64 for gradient checking).
"""

from __future__ import annotations

import numpy as np


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function, stable for large |x|."""
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - logits.max(axis=axis, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def lstm_step(wx, wh, b, x, h_prev, c_prev):
    """One LSTM step. Returns (h, c, cache) with cache feeding the backward step."""
    n = wh.shape[0]
    a = x @ wx + h_prev @ wh + b
    i = sigmoid(a[:, :n])
    f = sigmoid(a[:, n : 2 * n])
    g = np.tanh(a[:, 2 * n : 3 * n])
    o = sigmoid(a[:, 3 * n :])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c, (x, h_prev, c_prev, i, f, g, o, c)


def lstm_step_backward(wx, wh, cache, dh, dc, dwx, dwh, db):
    """Reverse one LSTM step.

    dh/dc are gradients flowing into this step's outputs; parameter
    gradients accumulate into dwx/dwh/db. Returns (dx, dh_prev, dc_prev).
    """
    x, h_prev, c_prev, i, f, g, o, c = cache
    tc = np.tanh(c)
    do = dh * tc
    dc_tot = dc + dh * o * (1.0 - tc * tc)
    di = dc_tot * g
    df = dc_tot * c_prev
    dg = dc_tot * i
    dc_prev = dc_tot * f
    da = np.concatenate(
        [
            di * i * (1.0 - i),
            df * f * (1.0 - f),
            dg * (1.0 - g * g),
            do * o * (1.0 - o),
        ],
        axis=1,
    )
    dwx += x.T @ da
    dwh += h_prev.T @ da
    db += da.sum(axis=0)
    return da @ wx.T, da @ wh.T, dc_prev
