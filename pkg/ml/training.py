"""
Training of the LSTM predictor: sliding-window data sets, mean squared
error, backpropagation through time, Adam and autoregressive rollout.
"""

import copy
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ml.model import LSTMModel, Normalization
from utils.exceptions import DivergedLoss, LookbackTooLarge

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """
    Sliding-window pairs in physical units.

    Attributes:
        inputs: (pairs, lb, M) windows
        targets: (pairs, M) next observation vectors
        normalization: Level and increment statistics of the training rows
    """

    inputs: np.ndarray
    targets: np.ndarray
    normalization: Normalization

    def __len__(self):
        return self.targets.shape[0]

    @property
    def lookback(self):
        return self.inputs.shape[1]

    def normalized(self):
        """Encoded windows and normalized increments of the targets over the last window row."""
        steps = self.targets - self.inputs[:, -1, :]
        return self.normalization.encode(self.inputs), self.normalization.normalize_step(steps)

    def subset(self, indices):
        indices = np.asarray(indices)
        return TrainingSet(self.inputs[indices], self.targets[indices], self.normalization)


def build_training_set(series, k_off, lb):
    """
    Windows over rows 0..k_off-1 of an observation series.

    Args:
        series: ObservationSeries (or an (rows, M) array)
        k_off: Number of rows available for training
        lb: Lookback

    Returns:
        TrainingSet with k_off - lb pairs

    Raises:
        LookbackTooLarge: unless 1 <= lb <= k_off - 1
    """
    values = np.asarray(getattr(series, "values", series), dtype=float)
    if lb < 1 or lb > k_off - 1:
        raise LookbackTooLarge(f"lookback {lb} must satisfy 1 <= lb <= k_off - 1 = {k_off - 1}")
    if k_off > values.shape[0]:
        raise LookbackTooLarge(f"k_off={k_off} exceeds the {values.shape[0]} available rows")
    rows = values[:k_off]
    count = k_off - lb
    inputs = np.stack([rows[i:i + lb] for i in range(count)])
    targets = rows[lb:k_off].copy()
    return TrainingSet(inputs, targets, Normalization.fit(rows))


def loss_mse(pred, target):
    """(1/M) sum_m (pred_m - target_m)^2, averaged over any leading batch axis."""
    diff = np.asarray(pred, dtype=float) - np.asarray(target, dtype=float)
    return float(np.mean(diff ** 2))


def batch_loss(model, tset):
    inputs, targets = tset.normalized()
    return loss_mse(model.forward_normalized(inputs), targets)


def gradient(model, batch):
    """
    Exact gradient of the mean batch loss (normalized space) with respect to
    every parameter tensor.

    Returns:
        Tuple (loss, dict of gradients keyed like ``model.parameters()``)
    """
    if len(batch) == 0:
        raise ValueError("gradient needs a non-empty batch")
    inputs, targets = batch.normalized()
    cache = {}
    pred = model.forward_normalized(inputs, cache)
    diff = pred - targets
    loss = float(np.mean(diff ** 2))
    grads = model.backward_normalized(2.0 * diff / diff.size, cache)
    return loss, grads


@dataclass
class AdamState:
    """First and second moment estimates per parameter tensor."""

    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0


def adam_step(params, grads, state, lr=1e-2, beta1=0.9, beta2=0.999, eps=1e-8, t=None):
    """
    Bias-corrected Adam update applied in place to ``params``.

    Args:
        params: name -> array mapping (updated in place)
        grads: name -> gradient array
        state: AdamState (moments updated in place)
        t: Step index (>= 1); defaults to state.t + 1

    Returns:
        The updated params mapping
    """
    t = state.t + 1 if t is None else t
    if t < 1:
        raise ValueError("Adam step index starts at 1")
    state.t = t
    for name, value in params.items():
        g = grads[name]
        m = state.m.get(name, np.zeros_like(value))
        v = state.v.get(name, np.zeros_like(value))
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        state.m[name] = m
        state.v[name] = v
        m_hat = m / (1.0 - beta1 ** t)
        v_hat = v / (1.0 - beta2 ** t)
        value -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return params


def train(tset, config, model=None):
    """
    Full-batch Adam training.

    The returned model carries the best parameters seen (the initial ones
    included) and the per-epoch loss history; ``final_loss`` is the loss of
    the returned parameters.

    Raises:
        DivergedLoss: if the loss becomes non-finite
    """
    if config.lookback != tset.lookback:
        raise LookbackTooLarge(
            f"config lookback {config.lookback} differs from training windows ({tset.lookback})")
    M = tset.targets.shape[1]
    model = model or LSTMModel.initialize(M, config, tset.normalization)
    model.normalization = tset.normalization
    params = model.parameters()
    state = AdamState()

    initial_loss = batch_loss(model, tset)
    best_loss = initial_loss
    best_params = copy.deepcopy(params)
    history = [initial_loss]
    logger.info("training: %d pairs, lb=%d, hidden=%d, initial loss %.6e",
                len(tset), config.lookback, config.hidden_size, initial_loss)

    for epoch in range(1, config.epochs + 1):
        loss, grads = gradient(model, tset)
        if not np.isfinite(loss):
            raise DivergedLoss(f"loss became non-finite at epoch {epoch}")
        if loss < best_loss:
            best_loss = loss
            best_params = copy.deepcopy(params)
        adam_step(params, grads, state, lr=config.learning_rate)
        history.append(loss)
        if epoch % 100 == 0:
            logger.debug("epoch %d: loss %.6e", epoch, loss)

    final = batch_loss(model, tset)
    if not np.isfinite(final):
        raise DivergedLoss("loss became non-finite after the last update")
    if final < best_loss:
        best_loss = final
    else:
        for name, value in params.items():
            value[...] = best_params[name]
    if best_loss >= initial_loss and config.epochs > 0:
        logger.warning("training did not improve on the initial loss %.6e", initial_loss)
    history.append(best_loss)
    model.loss_history = history
    logger.info("training finished: final loss %.6e", best_loss)
    return model


def training_log_frame(model):
    """Epoch/loss table; the last row is the loss of the returned parameters."""
    history = model.loss_history
    return pd.DataFrame({'epoch': np.arange(len(history)), 'loss': history})


def rollout(model, seed_window, n_steps):
    """
    Autoregressive prediction: each output is appended and the window slides.

    Args:
        model: Trained LSTMModel
        seed_window: (lb, M) observations in physical units
        n_steps: Number of predictions (>= 1)

    Returns:
        (n_steps, M) predicted observation vectors
    """
    if n_steps < 1:
        raise ValueError("rollout needs at least one step")
    window = np.array(seed_window, dtype=float)
    if window.shape[0] != model.lookback:
        raise ValueError(f"seed window has {window.shape[0]} rows, lookback is {model.lookback}")
    predictions = np.empty((n_steps, window.shape[1]))
    for step in range(n_steps):
        predictions[step] = model.predict(window)
        window = np.vstack([window[1:], predictions[step]])
    return predictions
