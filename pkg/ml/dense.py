"""
Dense head mapping the final LSTM state to an observation vector.
"""

from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("tanh", "identity")


@dataclass
class DenseLayer:
    """y = act(W x + b) with W of shape (out, in)."""

    W: np.ndarray
    b: np.ndarray
    activation: str = "tanh"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    def forward(self, x):
        z = x @ self.W.T + self.b
        return np.tanh(z) if self.activation == "tanh" else z


@dataclass
class DenseParams:
    """Chain of dense layers; the last one is linear."""

    layers: list

    def __post_init__(self):
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.W.shape[0] != nxt.W.shape[1]:
                raise ValueError("dense layer shapes do not chain")
        if self.layers and self.layers[-1].activation != "identity":
            raise ValueError("the output layer must be linear")

    def named(self):
        pairs = []
        for i, layer in enumerate(self.layers):
            pairs.append((f"dense{i}_W", layer.W))
            pairs.append((f"dense{i}_b", layer.b))
        return pairs

    @property
    def parameter_count(self):
        return sum(layer.W.size + layer.b.size for layer in self.layers)

    @classmethod
    def build(cls, input_size, widths, output_size, rng=None):
        """Hidden tanh layers of the given widths plus a linear output layer."""
        sizes = [input_size, *widths, output_size]
        layers = []
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            activation = "identity" if i == len(sizes) - 2 else "tanh"
            if rng is None:
                W, b = np.zeros((fan_out, fan_in)), np.zeros(fan_out)
            else:
                scale = 1.0 / np.sqrt(fan_in)
                W = rng.uniform(-scale, scale, (fan_out, fan_in))
                b = rng.uniform(-scale, scale, fan_out)
            layers.append(DenseLayer(W, b, activation))
        return cls(layers)

    def forward(self, h, cache=None):
        for layer in self.layers:
            if cache is not None:
                cache.append(h)
            h = layer.forward(h)
        if cache is not None:
            cache.append(h)
        return h

    def backward(self, dy, cache):
        """
        Gradients of the head given dLoss/dOutput.

        Returns:
            Tuple (dict of parameter gradients, gradient w.r.t. the head input)
        """
        grads = {}
        grad = dy
        for i in reversed(range(len(self.layers))):
            layer = self.layers[i]
            out = cache[i + 1]
            if layer.activation == "tanh":
                grad = grad * (1.0 - out ** 2)
            grads[f"dense{i}_W"] = grad.T @ cache[i]
            grads[f"dense{i}_b"] = grad.sum(axis=0)
            grad = grad @ layer.W
        return grads, grad
