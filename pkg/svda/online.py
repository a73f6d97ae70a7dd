"""
Online stage as a Mesa model: one model step per time index, each solving
the PBDW system twice (predicted and true observations) and recording the
error quantities with a DataCollector.
"""

import logging

import numpy as np
from mesa import Model
from mesa.datacollection import DataCollector
from mesa.time import BaseScheduler

from analytics.error_report import ErrorReport, ReportContext, step_errors
from fem import Trajectory
from pbdw import estimate
from svda.offline import offline
from svda.predictors import LSTMPredictor
from utils.exceptions import ConfigError, SolverError

logger = logging.getLogger(__name__)


class AssimilationModel(Model):
    """
    Sequential SVDA online loop over k = k_start..K.

    Either pass prebuilt ``artifacts`` or a ``config`` (and optionally a
    ``seed`` overriding the training seed), in which case the offline stage
    runs first. The second form is what the batch runner uses.
    """

    def __init__(self, artifacts=None, config=None, seed=None, predictor=None):
        super().__init__()
        if artifacts is None:
            if config is None:
                raise ConfigError("AssimilationModel needs artifacts or a config")
            if seed is not None:
                config = config.with_seed(seed)
            artifacts = offline(config)
        self.artifacts = artifacts
        self.predictor = predictor or LSTMPredictor.from_artifacts(artifacts)
        self.context = ReportContext.from_artifacts(artifacts)
        self.schedule = BaseScheduler(self)

        self.k = artifacts.k_start - 1
        self.last_step = artifacts.grid.K
        self.errors = {}
        self.svda_fields = []
        self.star_fields = []
        self.predictions = []

        self.datacollector = DataCollector(
            model_reporters={
                "k": lambda m: m.k,
                "t": lambda m: m.errors['t'],
                "err_bk_L2": lambda m: m.errors['err_bk_L2'],
                "err_star_L2": lambda m: m.errors['err_star_L2'],
                "err_svda_L2": lambda m: m.errors['err_svda_L2'],
                "err_bk_H1": lambda m: m.errors['err_bk_H1'],
                "err_star_H1": lambda m: m.errors['err_star_H1'],
                "err_svda_H1": lambda m: m.errors['err_svda_H1'],
                "beta": lambda m: m.errors['beta'],
                "bound_lhs": lambda m: m.errors['bound_lhs'],
                "bound_rhs": lambda m: m.errors['bound_rhs'],
                "eps_bk_N": lambda m: m.errors['eps_bk_N'],
                "bound_margin": lambda m: m.errors['bound_margin'],
                "pbdw_bound_literal": lambda m: m.errors['pbdw_bound_literal'],
                "pbdw_bound_complement": lambda m: m.errors['pbdw_bound_complement'],
                "svda_bound_literal": lambda m: m.errors['svda_bound_literal'],
                "svda_bound_complement": lambda m: m.errors['svda_bound_complement'],
            }
        )
        self.running = self.k < self.last_step

    def step(self):
        """Assimilate the next time index."""
        self.k += 1
        k = self.k
        art = self.artifacts
        try:
            predicted = np.asarray(self.predictor.predict(k), dtype=float)
            observed = art.true_series.row(k)
            svda = estimate(art.system, predicted, art.background, art.observable)
            star = estimate(art.system, observed, art.background, art.observable)
            self.errors = step_errors(
                k, art.grid.time(k), art.true_traj.at(k), art.bk_traj.at(k),
                star.field, svda.field, self.context,
                obs_true=observed, obs_predicted=predicted,
            )
        except SolverError as exc:
            if exc.step is None:
                exc.step = k
            raise
        self.svda_fields.append(svda.field)
        self.star_fields.append(star.field)
        self.predictions.append(predicted)

        self.schedule.step()
        self.datacollector.collect(self)
        if k >= self.last_step:
            self.running = False

    def report(self):
        return ErrorReport(self.datacollector.get_model_vars_dataframe())

    def _trajectory(self, fields):
        art = self.artifacts
        indices = np.arange(art.k_start, self.k + 1)
        return Trajectory(art.mesh, np.array(fields), art.grid.times[indices], art.k_start)

    def svda_trajectory(self):
        return self._trajectory(self.svda_fields)

    def star_trajectory(self):
        return self._trajectory(self.star_fields)


def run_online(artifacts, predictor=None):
    """Step an AssimilationModel to the end of the horizon and return it."""
    model = AssimilationModel(artifacts=artifacts, predictor=predictor)
    logger.info("online stage: k=%d..%d, beta=%.6f", artifacts.k_start, artifacts.grid.K,
                artifacts.system.beta)
    while model.running:
        model.step()
    stats = model.report().get_summary_stats()
    logger.info("online stage finished: mean relative L2 error bk %.3e, PBDW %.3e, SVDA %.3e",
                stats['mean_err_bk_L2'], stats['mean_err_star_L2'], stats['mean_err_svda_L2'])
    return model


def online(artifacts, predictor=None):
    """
    SVDA estimates for k = k_start..K.

    Args:
        artifacts: OfflineArtifacts
        predictor: Observation source (defaults to the LSTM rollout)

    Returns:
        Tuple (Trajectory of SVDA estimates, ErrorReport)
    """
    model = run_online(artifacts, predictor)
    return model.svda_trajectory(), model.report()
