"""
LSTM cell with forget, update and output gates.

    x_hat = [h, x]
    f = sigma(W_f x_hat + b_f)      u = sigma(W_u x_hat + b_u)
    o = sigma(W_o x_hat + b_o)      g = tanh(W_c x_hat + b_c)
    c' = f * c + u * g              h' = o * tanh(c')
"""

from dataclasses import dataclass

import numpy as np

GATES = ("f", "u", "o", "c")


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class LSTMParams:
    """
    Gate weights of shape (hidden, hidden + input) and biases of length hidden.
    """

    W_f: np.ndarray
    W_u: np.ndarray
    W_o: np.ndarray
    W_c: np.ndarray
    b_f: np.ndarray
    b_u: np.ndarray
    b_o: np.ndarray
    b_c: np.ndarray

    @property
    def hidden_size(self):
        return self.W_f.shape[0]

    @property
    def input_size(self):
        return self.W_f.shape[1] - self.hidden_size

    def weight(self, gate):
        return getattr(self, f"W_{gate}")

    def bias(self, gate):
        return getattr(self, f"b_{gate}")

    def named(self):
        """Ordered (name, array) pairs; arrays are the live parameters."""
        return [(f"W_{g}", self.weight(g)) for g in GATES] + [(f"b_{g}", self.bias(g)) for g in GATES]

    @classmethod
    def zeros(cls, input_size, hidden_size):
        width = hidden_size + input_size
        arrays = {f"W_{g}": np.zeros((hidden_size, width)) for g in GATES}
        arrays.update({f"b_{g}": np.zeros(hidden_size) for g in GATES})
        return cls(**arrays)

    @classmethod
    def random(cls, input_size, hidden_size, rng):
        """Uniform in [-s, s] with s = 1/sqrt(fan-in)."""
        width = hidden_size + input_size
        scale = 1.0 / np.sqrt(width)
        arrays = {f"W_{g}": rng.uniform(-scale, scale, (hidden_size, width)) for g in GATES}
        arrays.update({f"b_{g}": rng.uniform(-scale, scale, hidden_size) for g in GATES})
        return cls(**arrays)


def lstm_step(x, h, c, params, cache=None):
    """
    Advance the cell by one input.

    Works on single vectors or on batches (leading batch axis).

    Args:
        x: (..., input) input
        h: (..., hidden) recurrent state
        c: (..., hidden) cell state
        params: LSTMParams
        cache: Optional list; intermediate values for backpropagation are
            appended to it

    Returns:
        Tuple (h', c')
    """
    x_hat = np.concatenate([h, x], axis=-1)
    f = sigmoid(x_hat @ params.W_f.T + params.b_f)
    u = sigmoid(x_hat @ params.W_u.T + params.b_u)
    o = sigmoid(x_hat @ params.W_o.T + params.b_o)
    g = np.tanh(x_hat @ params.W_c.T + params.b_c)
    c_new = f * c + u * g
    tanh_c = np.tanh(c_new)
    h_new = o * tanh_c
    if cache is not None:
        cache.append({"x_hat": x_hat, "c": c, "f": f, "u": u, "o": o, "g": g, "tanh_c": tanh_c})
    return h_new, c_new


def lstm_sequence(window, params, cache=None):
    """
    Run the cell over a (batch, lb, input) window from h = c = 0.

    Returns:
        Final recurrent state (batch, hidden)
    """
    batch = window.shape[0]
    h = np.zeros((batch, params.hidden_size))
    c = np.zeros((batch, params.hidden_size))
    for t in range(window.shape[1]):
        h, c = lstm_step(window[:, t, :], h, c, params, cache)
    return h


def lstm_backward(dh, cache, params):
    """
    Backpropagation through time of ``lstm_sequence``.

    Args:
        dh: (batch, hidden) gradient with respect to the final h
        cache: Step caches filled by the forward pass
        params: LSTMParams used in the forward pass

    Returns:
        Dict of gradients keyed like ``LSTMParams.named``
    """
    H = params.hidden_size
    grads = {name: np.zeros_like(value) for name, value in params.named()}
    dc = np.zeros_like(dh)
    for step in reversed(cache):
        do = dh * step["tanh_c"]
        dc = dc + dh * step["o"] * (1.0 - step["tanh_c"] ** 2)
        dz = {
            "f": dc * step["c"] * step["f"] * (1.0 - step["f"]),
            "u": dc * step["g"] * step["u"] * (1.0 - step["u"]),
            "o": do * step["o"] * (1.0 - step["o"]),
            "c": dc * step["u"] * (1.0 - step["g"] ** 2),
        }
        dx_hat = np.zeros_like(step["x_hat"])
        for gate in GATES:
            grads[f"W_{gate}"] += dz[gate].T @ step["x_hat"]
            grads[f"b_{gate}"] += dz[gate].sum(axis=0)
            dx_hat += dz[gate] @ params.weight(gate)
        dh = dx_hat[:, :H]
        dc = dc * step["f"]
    return grads
