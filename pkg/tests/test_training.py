"""Tests for training sets, Adam, training and rollout."""

import numpy as np
import pytest

from ml import AdamState, ModelConfig, adam_step, build_training_set, rollout, train, training_log_frame
from ml.model import SCALE_FLOOR
from utils.exceptions import DivergedLoss, LookbackTooLarge


def sine_rows(count=50, M=3):
    t = np.linspace(0.0, 4.0, count)[:, None]
    return 300.0 + np.sin(t + np.arange(M)[None, :])


class TestTrainingSet:
    @pytest.mark.parametrize("lb, pairs", [(1, 49), (7, 43), (49, 1)])
    def test_pair_counts(self, lb, pairs):
        tset = build_training_set(sine_rows(), 50, lb)
        assert len(tset) == pairs
        assert tset.inputs.shape == (pairs, lb, 3)

    def test_window_alignment(self):
        rows = sine_rows()
        tset = build_training_set(rows, 50, 3)
        np.testing.assert_array_equal(tset.inputs[0], rows[0:3])
        np.testing.assert_array_equal(tset.targets[0], rows[3])
        np.testing.assert_array_equal(tset.targets[-1], rows[49])

    def test_only_rows_before_k_off_are_used(self):
        rows = sine_rows()
        tset = build_training_set(rows, 20, 1)
        assert len(tset) == 19
        np.testing.assert_allclose(tset.normalization.mean, rows[:20].mean(axis=0))

    @pytest.mark.parametrize("lb", [0, 50])
    def test_lookback_out_of_range(self, lb):
        with pytest.raises(LookbackTooLarge):
            build_training_set(sine_rows(), 50, lb)

    def test_constant_sensor_uses_scale_floor(self):
        rows = sine_rows()
        rows[:, 1] = 300.0
        tset = build_training_set(rows, 50, 1)
        assert tset.normalization.scale[1] == SCALE_FLOOR
        assert tset.normalization.step_scale[1] == SCALE_FLOOR
        assert np.all(np.isfinite(tset.normalized()[0]))


class TestAdam:
    def test_first_step_moves_by_learning_rate(self):
        params = {"w": np.array([1.0, -2.0, 0.5])}
        grads = {"w": np.array([0.3, -4.0, 1e-3])}
        state = AdamState()
        adam_step(params, grads, state, lr=0.1)
        np.testing.assert_allclose(params["w"], [0.9, -1.9, 0.4], rtol=1e-4)
        assert state.t == 1

    def test_step_index_starts_at_one(self):
        with pytest.raises(ValueError):
            adam_step({"w": np.zeros(1)}, {"w": np.zeros(1)}, AdamState(), t=0)


class TestTrain:
    def config(self, epochs=60, lookback=1, seed=3):
        return ModelConfig(lookback=lookback, hidden_size=6, dense_widths=(8,), epochs=epochs, seed=seed)

    def test_loss_decreases_and_history_is_complete(self):
        tset = build_training_set(sine_rows(), 50, 1)
        model = train(tset, self.config())
        history = model.loss_history
        assert len(history) == 60 + 2
        assert model.final_loss < history[0]
        assert model.final_loss == pytest.approx(min(history))

    def test_deterministic_for_a_seed(self):
        tset = build_training_set(sine_rows(), 50, 2)
        a = train(tset, self.config(lookback=2)).parameters()
        b = train(tset, self.config(lookback=2)).parameters()
        assert all(np.array_equal(a[name], b[name]) for name in a)

    def test_no_epochs_keeps_initial_parameters(self):
        tset = build_training_set(sine_rows(), 50, 1)
        model = train(tset, self.config(epochs=0))
        assert model.loss_history[0] == model.loss_history[-1]

    def test_diverging_learning_rate(self):
        tset = build_training_set(sine_rows(), 50, 1)
        config = ModelConfig(hidden_size=4, dense_widths=(4,), learning_rate=1e200, epochs=20)
        with np.errstate(all="ignore"), pytest.raises(DivergedLoss):
            train(tset, config)

    def test_lookback_mismatch(self):
        tset = build_training_set(sine_rows(), 50, 2)
        with pytest.raises(LookbackTooLarge):
            train(tset, self.config(lookback=1))

    def test_training_log(self):
        tset = build_training_set(sine_rows(), 50, 1)
        frame = training_log_frame(train(tset, self.config(epochs=5)))
        assert list(frame.columns) == ["epoch", "loss"]
        assert len(frame) == 7


class TestRollout:
    def test_predictions_feed_back(self):
        rows = sine_rows()
        tset = build_training_set(rows, 50, 2)
        model = train(tset, TestTrain().config(epochs=10, lookback=2))
        predictions = rollout(model, rows[-2:], 4)
        assert predictions.shape == (4, 3)
        np.testing.assert_allclose(predictions[0], model.predict(rows[-2:]))
        np.testing.assert_allclose(predictions[1], model.predict(np.vstack([rows[-1], predictions[0]])))

    def test_seed_window_must_match_lookback(self):
        rows = sine_rows()
        model = train(build_training_set(rows, 50, 2), TestTrain().config(epochs=0, lookback=2))
        with pytest.raises(ValueError):
            rollout(model, rows[-3:], 2)

    def test_rollout_composes(self):
        rows = sine_rows()
        model = train(build_training_set(rows, 50, 2), TestTrain().config(epochs=10, lookback=2))
        whole = rollout(model, rows[-2:], 7)
        head = rollout(model, rows[-2:], 3)
        rest = rollout(model, np.vstack([rows[-2:], head])[-2:], 4)
        np.testing.assert_allclose(whole, np.vstack([head, rest]), rtol=1e-14)

    def test_constant_series_stays_constant(self):
        rows = np.tile([300.0, 295.0, 310.0], (30, 1))
        model = train(build_training_set(rows, 30, 1), TestTrain().config(epochs=10))
        predictions = rollout(model, rows[-1:], 5)
        np.testing.assert_allclose(predictions, np.tile(rows[-1], (5, 1)), atol=1e-9)

    def test_linear_trend_continues_past_the_training_range(self):
        rows = 293.0 + 0.01 * np.arange(40)[:, None] * np.ones((1, 3))
        model = train(build_training_set(rows, 40, 1), TestTrain().config(epochs=0))
        # the untrained head adds roughly the mean increment
        predictions = rollout(model, rows[-1:], 20)
        assert np.all(np.diff(predictions[:, 0]) > 0)
        assert predictions[-1, 0] > rows[-1, 0] + 0.1
