"""
LSTM recurrent network with a dense head, predicting the next observation
vector from the lb previous ones as an increment over the last of them.
"""

from dataclasses import dataclass, field, asdict

import numpy as np

from ml.dense import DenseParams
from ml.lstm import LSTMParams, lstm_backward, lstm_sequence

SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class ModelConfig:
    """
    Network and training settings.

    Attributes:
        lookback: Number of previous observation vectors fed to the network
        hidden_size: LSTM state width
        dense_widths: Widths of the tanh hidden layers of the head
        learning_rate: Adam step size
        epochs: Full-batch epochs
        seed: Initialization seed
    """

    lookback: int = 1
    hidden_size: int = 32
    dense_widths: tuple = (32, 32)
    learning_rate: float = 1e-2
    epochs: int = 2000
    seed: int = 2024

    def __post_init__(self):
        if self.lookback < 1:
            raise ValueError(f"lookback must be positive, got {self.lookback}")
        if self.hidden_size < 1:
            raise ValueError(f"hidden_size must be positive, got {self.hidden_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")
        object.__setattr__(self, "dense_widths", tuple(int(w) for w in self.dense_widths))

    def to_dict(self):
        data = asdict(self)
        data["dense_widths"] = list(self.dense_widths)
        return data


@dataclass
class Normalization:
    """
    Input and output maps of the predictor.

    Windows enter the network as tanh((x - mean) / scale). The network
    output is the increment over the last window row, in units of
    (d - step_mean) / step_scale.
    """

    mean: np.ndarray
    scale: np.ndarray
    step_mean: np.ndarray
    step_scale: np.ndarray

    @classmethod
    def fit(cls, rows):
        """Level statistics of the rows and increment statistics of consecutive rows."""
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        steps = np.diff(rows, axis=0)
        if steps.shape[0] == 0:
            steps = np.zeros_like(rows)
        return cls(rows.mean(axis=0), np.maximum(rows.std(axis=0), SCALE_FLOOR),
                   steps.mean(axis=0), np.maximum(steps.std(axis=0), SCALE_FLOOR))

    @classmethod
    def identity(cls, size):
        return cls(np.zeros(size), np.ones(size), np.zeros(size), np.ones(size))

    def normalize(self, x):
        return (np.asarray(x, dtype=float) - self.mean) / self.scale

    def denormalize(self, y):
        return np.asarray(y, dtype=float) * self.scale + self.mean

    def encode(self, window):
        return np.tanh(self.normalize(window))

    def normalize_step(self, d):
        return (np.asarray(d, dtype=float) - self.step_mean) / self.step_scale

    def denormalize_step(self, y):
        return np.asarray(y, dtype=float) * self.step_scale + self.step_mean


MASK64 = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """
    splitmix64 stream; floats take the top 53 bits of each output.

    Exposes the ``uniform`` draw of numpy generators, which is all the
    parameter initializers use.
    """

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_uint64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self, size=None):
        count = 1 if size is None else int(np.prod(size))
        values = np.array([(self.next_uint64() >> 11) * 2.0 ** -53 for _ in range(count)])
        return float(values[0]) if size is None else values.reshape(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return low + (high - low) * self.random(size)


def make_rng(seed):
    """Deterministic splitmix64 generator for a 64-bit seed."""
    return SplitMix64(seed)


@dataclass
class LSTMModel:
    """
    Trainable predictor: lb LSTM steps with shared weights, then the dense
    head. Inputs and outputs are in physical units; the head output is the
    normalized increment over the last window row.
    """

    lstm: LSTMParams
    dense: DenseParams
    normalization: Normalization
    config: ModelConfig
    loss_history: list = field(default_factory=list)

    @classmethod
    def initialize(cls, input_size, config, normalization=None):
        rng = make_rng(config.seed)
        lstm = LSTMParams.random(input_size, config.hidden_size, rng)
        dense = DenseParams.build(config.hidden_size, config.dense_widths, input_size, rng)
        return cls(lstm, dense, normalization or Normalization.identity(input_size), config)

    @classmethod
    def zeros(cls, input_size, config, normalization=None):
        lstm = LSTMParams.zeros(input_size, config.hidden_size)
        dense = DenseParams.build(config.hidden_size, config.dense_widths, input_size)
        return cls(lstm, dense, normalization or Normalization.identity(input_size), config)

    @property
    def input_size(self):
        return self.lstm.input_size

    @property
    def lookback(self):
        return self.config.lookback

    @property
    def final_loss(self):
        return self.loss_history[-1] if self.loss_history else None

    def parameters(self):
        """Ordered name -> live array mapping of every trainable tensor."""
        return dict(self.lstm.named() + self.dense.named())

    @property
    def parameter_count(self):
        return sum(value.size for value in self.parameters().values())

    @staticmethod
    def expected_parameter_count(input_size, hidden_size, widths):
        sizes = [hidden_size, *widths, input_size]
        head = sum(a * b + b for a, b in zip(sizes[:-1], sizes[1:]))
        return 4 * hidden_size * (hidden_size + input_size) + 4 * hidden_size + head

    def forward_normalized(self, windows, cache=None):
        """
        Batched forward pass in normalized space.

        Args:
            windows: (batch, lb, M) encoded windows
            cache: Optional dict receiving "lstm" and "dense" caches

        Returns:
            (batch, M) normalized increments
        """
        lstm_cache = [] if cache is not None else None
        dense_cache = [] if cache is not None else None
        h = lstm_sequence(windows, self.lstm, lstm_cache)
        y = self.dense.forward(h, dense_cache)
        if cache is not None:
            cache["lstm"] = lstm_cache
            cache["dense"] = dense_cache
        return y

    def backward_normalized(self, dy, cache):
        """Parameter gradients given dLoss/dPrediction (normalized space)."""
        grads, dh = self.dense.backward(dy, cache["dense"])
        grads.update(lstm_backward(dh, cache["lstm"], self.lstm))
        return grads

    def predict(self, window):
        """
        Next observation vector from an (lb, M) window in physical units.
        """
        window = np.asarray(window, dtype=float)
        encoded = self.normalization.encode(window)[None, :, :]
        step = self.normalization.denormalize_step(self.forward_normalized(encoded)[0])
        return window[-1] + step


def forward(window, model):
    """Map (l^k, ..., l^{k+lb-1}) to the predicted l^{k+lb}."""
    return model.predict(window)
