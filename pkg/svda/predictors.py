"""
Sources of the observation vectors fed to the online stage.
"""

import numpy as np

from utils.exceptions import OutOfOrderRequest


class LSTMPredictor:
    """
    Sequential rollout of a trained model.

    The window is seeded with the last lb true-observation rows before
    ``k_start``; afterwards every prediction re-enters the window. Requests
    must come in order: k_start, k_start + 1, ... (already computed indices
    may be asked again).
    """

    def __init__(self, model, seed_rows, k_start):
        seed_rows = np.asarray(seed_rows, dtype=float)
        if seed_rows.shape[0] != model.lookback:
            raise ValueError(f"seed window has {seed_rows.shape[0]} rows, lookback is {model.lookback}")
        self.model = model
        self.k_start = int(k_start)
        self._window = seed_rows.copy()
        self._cache = {}

    @classmethod
    def from_artifacts(cls, artifacts):
        lb = artifacts.model.lookback
        k_start = artifacts.k_start
        seed_rows = artifacts.true_series.values[k_start - lb:k_start]
        return cls(artifacts.model, seed_rows, k_start)

    @property
    def next_index(self):
        return self.k_start + len(self._cache)

    def predict(self, k):
        if k in self._cache:
            return self._cache[k]
        if k != self.next_index:
            raise OutOfOrderRequest(
                f"prediction for k={k} requested, next available index is {self.next_index}", step=k)
        prediction = self.model.predict(self._window)
        self._window = np.vstack([self._window[1:], prediction])
        self._cache[k] = prediction
        return prediction


class OraclePredictor:
    """Stub returning the true observations."""

    def __init__(self, series):
        self.series = series

    def predict(self, k):
        return np.array(self.series.row(k), dtype=float)


class ZeroPredictor:
    """Stub returning zero observations."""

    def __init__(self, sensor_count):
        self.sensor_count = sensor_count

    def predict(self, k):
        return np.zeros(self.sensor_count)


def predict_observations(artifacts, k):
    """
    l^{k,DL} from the rollout shared by all callers holding ``artifacts``.

    Raises:
        OutOfOrderRequest: if k skips ahead of the cached predictions or
            precedes the first predicted index
    """
    if k < artifacts.k_start:
        raise OutOfOrderRequest(
            f"k={k} precedes the first predicted index {artifacts.k_start}", step=k)
    return artifacts.predictor.predict(k)
