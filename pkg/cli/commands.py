"""
Pipeline commands: generate, train, assimilate, report, all, and the
repeated-seed aggregation.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from mesa.batchrunner import batch_run

from analytics.error_report import EXTRA_COLUMNS, REPORT_COLUMNS, ErrorReport
from cli.plots import write_html, write_svg
from fem.io import write_field_csv, write_fields_binary
from observation import ObservationSeries, observe_trajectory
from svda.offline import (
    build_spaces, fit_model, load_offline, load_training_series,
    persist_background, persist_model, persist_synthesis, synthesize, training_series_of,
    write_metadata,
)
from svda.online import AssimilationModel, run_online
from svda.predictors import OraclePredictor

logger = logging.getLogger(__name__)

ERRORS = "errors.csv"
ERRORS_MEDIAN = "errors_median.csv"
SUMMARY = "summary.json"
SVDA_TRAJECTORY = "svda_trajectory.bin"
STAR_TRAJECTORY = "pbdw_true_obs_trajectory.bin"
PREDICTIONS = "predicted_observations.csv"
SVDA_FINAL = "svda_final.csv"
TRUE_FINAL = "true_final.csv"
PLOT_SVG = "errors.svg"
PLOT_HTML = "errors.html"


def cmd_generate(config, out_dir):
    """Solve both models, build the spaces and write trajectories and observations."""
    out_dir = Path(out_dir)
    write_metadata(config, out_dir, "generate")
    synthesis = synthesize(config)
    _, _, background, observable, _ = build_spaces(config, synthesis.mesh, synthesis.bk_traj)
    true_series = observe_trajectory(synthesis.true_traj, observable)
    training_series = training_series_of(config, synthesis.training_traj, observable)
    persist_synthesis(synthesis, true_series, training_series, config, out_dir)
    persist_background(background, out_dir)
    return true_series


def cmd_train(config, out_dir):
    """Train the predictor on the generated observation file."""
    out_dir = Path(out_dir)
    write_metadata(config, out_dir, "train")
    model = fit_model(config, load_training_series(config, out_dir))
    persist_model(model, out_dir)
    return model


def cmd_assimilate(config, out_dir, oracle_stub=False):
    """
    Online stage from the run files; writes the error CSV, the estimate
    trajectories, the final snapshots and the summary.
    """
    out_dir = Path(out_dir)
    write_metadata(config, out_dir, "assimilate")
    artifacts = load_offline(config, out_dir)
    predictor = OraclePredictor(artifacts.true_series) if oracle_stub else None
    if oracle_stub:
        logger.info("using true observations in place of the predictions")
    model = run_online(artifacts, predictor)
    report = model.report()
    report.to_csv(out_dir / ERRORS)

    svda_traj = model.svda_trajectory()
    star_traj = model.star_trajectory()
    write_fields_binary(out_dir / SVDA_TRAJECTORY, svda_traj.fields)
    write_fields_binary(out_dir / STAR_TRAJECTORY, star_traj.fields)
    ObservationSeries(np.array(model.predictions), svda_traj.times,
                      artifacts.k_start).to_csv(out_dir / PREDICTIONS)
    last = artifacts.grid.K
    write_field_csv(out_dir / SVDA_FINAL, artifacts.mesh, svda_traj.at(last))
    write_field_csv(out_dir / TRUE_FINAL, artifacts.mesh, artifacts.true_traj.at(last))

    summary = {
        'name': config.name,
        'mode': config.mode,
        'oracle_stub': bool(oracle_stub),
        'final_training_loss': artifacts.model.final_loss,
        **report.get_summary_stats(),
    }
    with open(out_dir / SUMMARY, 'w') as handle:
        json.dump(summary, handle, indent=2)
    logger.info("wrote %s (%d steps) and %s", ERRORS, len(report), SUMMARY)
    return report


def cmd_report(run_dir):
    """SVG (and HTML) error plot of a run directory's error CSV."""
    run_dir = Path(run_dir)
    report = ErrorReport.from_csv(run_dir / ERRORS)
    title = f"Relative L2 error: {run_dir.name}"
    write_svg(report.frame, run_dir / PLOT_SVG, title)
    write_html(report.frame, run_dir / PLOT_HTML, title)
    logger.info("wrote %s and %s", run_dir / PLOT_SVG, run_dir / PLOT_HTML)
    return run_dir / PLOT_SVG


def cmd_all(config, out_dir, oracle_stub=False):
    cmd_generate(config, out_dir)
    cmd_train(config, out_dir)
    report = cmd_assimilate(config, out_dir, oracle_stub)
    cmd_report(out_dir)
    return report


def median_errors(results):
    """Per-step median over runs of every numeric error column."""
    frame = pd.DataFrame(results)
    columns = [c for c in REPORT_COLUMNS + EXTRA_COLUMNS if c not in ('k', 't') and c in frame]
    grouped = frame.groupby('k', sort=True)
    median = grouped[columns].median()
    median.insert(0, 't', grouped['t'].first())
    median.insert(1, 'runs', grouped.size())
    return median.reset_index()


def cmd_repeat(config, out_dir, repeats):
    """
    Run the whole pipeline for ``repeats`` consecutive seeds in parallel
    and write the per-step median error table.
    """
    out_dir = Path(out_dir)
    write_metadata(config, out_dir, f"repeat {repeats}")
    seeds = [config.ml.seed + i for i in range(repeats)]
    logger.info("repeating %s for seeds %s", config.name, seeds)
    results = batch_run(
        AssimilationModel,
        parameters={'config': [config], 'seed': seeds},
        number_processes=repeats,
        iterations=1,
        data_collection_period=1,
        max_steps=config.time.K + 1,
        display_progress=False,
    )
    median = median_errors(results)
    median.to_csv(out_dir / ERRORS_MEDIAN, index=False)
    logger.info("wrote %s over %d runs", out_dir / ERRORS_MEDIAN, repeats)
    return median
