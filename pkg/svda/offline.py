"""
Offline stage: synthesize the true and bk trajectories, build the
background and observable spaces, assemble the PBDW system and train the
observation predictor.
"""

import contextlib
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from datetime import datetime
from pathlib import Path

import numpy as np

from fem import (
    RadiationBC, bimaterial_diffusivity, build_mesh, solve_trajectory, uniform_diffusivity,
    assemble_mass, h1_gram, Trajectory,
)
from fem.io import read_fields_binary, write_fields_binary
from ml import build_training_set, load_checkpoint, save_checkpoint, train, training_log_frame
from observation import ObservationSeries, build_observable_space, build_patch_grid, observe_trajectory
from pbdw import assemble_system
from reduction import pod
from svda.predictors import LSTMPredictor
from utils.exceptions import FormatError, SVDAError

logger = logging.getLogger(__name__)

TRUE_TRAJECTORY = "true_trajectory.bin"
TRAINING_TRAJECTORY = "training_trajectory.bin"
BK_TRAJECTORY = "bk_trajectory.bin"
BACKGROUND = "background.bin"
EIGENVALUES = "pod_eigenvalues.csv"
OBSERVATIONS = "observations.csv"
TRAINING_OBSERVATIONS = "training_observations.csv"
CHECKPOINT = "model.ckpt"
TRAINING_LOG = "training_log.csv"
METADATA = "run_metadata.json"


@dataclass(frozen=True, eq=False)
class Synthesis:
    """Trajectories of the synthetic truth and of the bk model."""

    mesh: object
    grid: object
    true_traj: Trajectory
    training_traj: Trajectory
    bk_traj: Trajectory


@dataclass(frozen=True, eq=False)
class OfflineArtifacts:
    """
    Everything the online stage needs.

    Attributes:
        config: ExperimentConfig the artifacts were built from
        mesh, G, mass: Discretization and its Gram matrices
        grid: TimeGrid
        true_traj: Truth the estimates are compared against
        bk_traj: bk-model trajectory (the bk-only estimate)
        background: BackgroundSpace Z_N
        observable: ObservableSpace U_M
        system: PBDWSystem
        model: Trained LSTMModel (None before training)
        training_series: Observation rows the model was trained on
        true_series: Observations of the truth at every time index
        k_start: First time index that receives predicted observations
    """

    config: object
    mesh: object
    G: object
    mass: object
    grid: object
    true_traj: Trajectory
    bk_traj: Trajectory
    background: object
    observable: object
    system: object
    model: object
    training_series: ObservationSeries
    true_series: ObservationSeries
    k_start: int

    @cached_property
    def predictor(self):
        """Rollout shared by every caller of ``predict_observations``."""
        return LSTMPredictor.from_artifacts(self)


@contextlib.contextmanager
def stage(name):
    """Tag SVDA errors raised inside the block with a pipeline stage."""
    try:
        yield
    except SVDAError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def synthesize(config):
    """Solve the true model (bi-material) and the bk model (uniform)."""
    physics = config.physics
    with stage("synthesize"):
        mesh = build_mesh(config.mesh.nx, config.mesh.ny)
        grid = config.time_grid
        bc = RadiationBC(epsilon=physics.epsilon, u_r=physics.u_r, sigma=physics.sigma)
        u0 = np.full(mesh.node_count, physics.u_0)

        training_field = bimaterial_diffusivity(mesh, physics.mu_true, physics.inner_diffusivity)
        training_traj = solve_trajectory(u0, grid, training_field, bc)
        if config.parametric:
            test_field = bimaterial_diffusivity(mesh, physics.mu_test, physics.inner_diffusivity)
            true_traj = solve_trajectory(u0, grid, test_field, bc)
        else:
            true_traj = training_traj
        bk_traj = solve_trajectory(u0, grid, uniform_diffusivity(mesh, physics.mu_bk), bc)
    return Synthesis(mesh, grid, true_traj, training_traj, bk_traj)


def build_spaces(config, mesh, bk_traj):
    """
    Gram matrices, Z_N, U_M and the PBDW system.

    Returns:
        Tuple (G, mass, background, observable, system)
    """
    with stage("reduction"):
        G = h1_gram(mesh)
        mass = assemble_mass(mesh)
        snapshots = bk_traj.subsample(config.reduction.snapshot_stride).fields
        background = pod(snapshots, G, config.reduction.N)
    with stage("observation"):
        sensors = config.sensors
        patches = build_patch_grid(sensors.side_count, sensors.halfwidth, mesh, sensors.margin)
        observable = build_observable_space(patches, G, mesh)
    with stage("pbdw"):
        system = assemble_system(background, observable, G)
    return G, mass, background, observable, system


def training_series_of(config, training_traj, observable):
    series = observe_trajectory(training_traj, observable)
    return series.head(config.training_rows)


def fit_model(config, training_series):
    with stage("training"):
        tset = build_training_set(training_series, config.training_rows, config.ml.lb)
        logger.info("training set: %d pairs (lb=%d)", len(tset), config.ml.lb)
        return train(tset, config.model_config)


def offline(config, out_dir=None):
    """
    Run the whole offline stage; persist the artifacts when ``out_dir`` is given.

    Returns:
        OfflineArtifacts
    """
    logger.info("offline stage: %s (%s mode), mesh %dx%d, K=%d",
                config.name, config.mode, config.mesh.nx, config.mesh.ny, config.time.K)
    synthesis = synthesize(config)
    G, mass, background, observable, system = build_spaces(config, synthesis.mesh, synthesis.bk_traj)
    with stage("observation"):
        true_series = observe_trajectory(synthesis.true_traj, observable)
        training_series = training_series_of(config, synthesis.training_traj, observable)
    model = fit_model(config, training_series)
    artifacts = OfflineArtifacts(
        config=config, mesh=synthesis.mesh, G=G, mass=mass, grid=synthesis.grid,
        true_traj=synthesis.true_traj, bk_traj=synthesis.bk_traj,
        background=background, observable=observable, system=system, model=model,
        training_series=training_series, true_series=true_series,
        k_start=config.assimilation_start,
    )
    if out_dir is not None:
        persist_synthesis(synthesis, true_series, training_series, config, out_dir)
        persist_background(background, out_dir)
        persist_model(model, out_dir)
    return artifacts


def write_metadata(config, out_dir, command):
    """Timestamped sidecar; the only file whose bytes change between runs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metadata = {
        'timestamp': datetime.now().isoformat(),
        'command': command,
        'config': config.to_dict(),
    }
    path = out_dir / METADATA
    with open(path, 'w') as handle:
        json.dump(metadata, handle, indent=2)
    return path


def persist_synthesis(synthesis, true_series, training_series, config, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_fields_binary(out_dir / TRUE_TRAJECTORY, synthesis.true_traj.fields)
    write_fields_binary(out_dir / BK_TRAJECTORY, synthesis.bk_traj.fields)
    true_series.to_csv(out_dir / OBSERVATIONS)
    if config.parametric:
        write_fields_binary(out_dir / TRAINING_TRAJECTORY, synthesis.training_traj.fields)
        training_series.to_csv(out_dir / TRAINING_OBSERVATIONS)
    logger.info("wrote trajectories and observations to %s", out_dir)


def persist_background(background, out_dir):
    out_dir = Path(out_dir)
    write_fields_binary(out_dir / BACKGROUND, background.basis.T)
    background.eigenvalue_frame().to_csv(out_dir / EIGENVALUES, index=False)


def persist_model(model, out_dir):
    out_dir = Path(out_dir)
    save_checkpoint(out_dir / CHECKPOINT, model)
    training_log_frame(model).to_csv(out_dir / TRAINING_LOG, index=False)
    logger.info("wrote checkpoint and training log to %s", out_dir)


def _require(path):
    if not path.exists():
        raise FormatError(f"missing run file {path}; run the earlier commands first")
    return path


def load_synthesis(config, run_dir):
    """Trajectories written by ``persist_synthesis``."""
    run_dir = Path(run_dir)
    mesh = build_mesh(config.mesh.nx, config.mesh.ny)
    grid = config.time_grid
    true_fields = read_fields_binary(_require(run_dir / TRUE_TRAJECTORY))
    bk_fields = read_fields_binary(_require(run_dir / BK_TRAJECTORY))
    expected = (grid.K + 1, mesh.node_count)
    for fields in (true_fields, bk_fields):
        if fields.shape != expected:
            raise FormatError(f"trajectory shape {fields.shape} does not match the config {expected}")
    true_traj = Trajectory(mesh, true_fields, grid.times)
    bk_traj = Trajectory(mesh, bk_fields, grid.times)
    training_traj = true_traj
    if config.parametric:
        training_fields = read_fields_binary(_require(run_dir / TRAINING_TRAJECTORY))
        training_traj = Trajectory(mesh, training_fields, grid.times)
    return Synthesis(mesh, grid, true_traj, training_traj, bk_traj)


def load_training_series(config, run_dir):
    run_dir = Path(run_dir)
    name = TRAINING_OBSERVATIONS if config.parametric else OBSERVATIONS
    series = ObservationSeries.from_csv(_require(run_dir / name))
    if series.sensor_count != config.sensors.side_count ** 2:
        raise FormatError(f"{name} has {series.sensor_count} sensors, the config has "
                          f"{config.sensors.side_count ** 2}")
    return series.head(config.training_rows)


def load_offline(config, run_dir, model=None):
    """
    Rebuild the artifacts from a run directory: trajectories and the
    checkpoint are read, the spaces are recomputed.
    """
    run_dir = Path(run_dir)
    synthesis = load_synthesis(config, run_dir)
    G, mass, background, observable, system = build_spaces(config, synthesis.mesh, synthesis.bk_traj)
    true_series = observe_trajectory(synthesis.true_traj, observable)
    training_series = training_series_of(config, synthesis.training_traj, observable)
    if model is None:
        model = load_checkpoint(_require(run_dir / CHECKPOINT))
    if model.lookback != config.ml.lb or model.input_size != observable.size:
        raise FormatError(f"checkpoint (lb={model.lookback}, M={model.input_size}) does not "
                          f"match the config (lb={config.ml.lb}, M={observable.size})")
    return OfflineArtifacts(
        config=config, mesh=synthesis.mesh, G=G, mass=mass, grid=synthesis.grid,
        true_traj=synthesis.true_traj, bk_traj=synthesis.bk_traj,
        background=background, observable=observable, system=system, model=model,
        training_series=training_series, true_series=true_series,
        k_start=config.assimilation_start,
    )
