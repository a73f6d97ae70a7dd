"""
Statistical variational data assimilation: offline and online stages.
"""

from .offline import OfflineArtifacts, offline, load_offline
from .predictors import LSTMPredictor, OraclePredictor, ZeroPredictor, predict_observations
from .online import AssimilationModel, online, run_online
from analytics.error_report import ErrorReport, error_report

__all__ = [
    'OfflineArtifacts', 'offline', 'load_offline',
    'LSTMPredictor', 'OraclePredictor', 'ZeroPredictor', 'predict_observations',
    'AssimilationModel', 'online', 'run_online',
    'ErrorReport', 'error_report',
]
