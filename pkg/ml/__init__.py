"""
From-scratch LSTM predictor of observation vectors.
"""

from .lstm import LSTMParams, lstm_step, sigmoid
from .dense import DenseLayer, DenseParams
from .model import LSTMModel, ModelConfig, Normalization, forward
from .training import (
    TrainingSet, AdamState,
    build_training_set, loss_mse, gradient, adam_step, train, rollout, training_log_frame,
)
from .checkpoint import save_checkpoint, load_checkpoint

__all__ = [
    'LSTMParams', 'lstm_step', 'sigmoid',
    'DenseLayer', 'DenseParams',
    'LSTMModel', 'ModelConfig', 'Normalization', 'forward',
    'TrainingSet', 'AdamState',
    'build_training_set', 'loss_mse', 'gradient', 'adam_step', 'train', 'rollout',
    'training_log_frame',
    'save_checkpoint', 'load_checkpoint',
]
