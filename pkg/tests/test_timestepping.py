"""Tests for the backward-Euler heat solver."""

import numpy as np
import pytest

from fem import (
    HeatProblem, RadiationBC, TimeGrid, assemble_mass, bimaterial_diffusivity, build_mesh,
    solve_trajectory, step_implicit_euler, uniform_diffusivity,
)
from utils.exceptions import NonConvergence, NonPhysical


@pytest.fixture(scope="module")
def small_mesh():
    return build_mesh(4, 4)


class TestTimeGrid:
    def test_step_and_times(self):
        grid = TimeGrid(2.5, 200, 50)
        assert grid.tau == pytest.approx(1.25e-2)
        assert len(grid.times) == 201
        assert grid.time(200) == pytest.approx(2.5)

    def test_rejects_k_off_outside_horizon(self):
        with pytest.raises(ValueError):
            TimeGrid(2.5, 10, 11)
        with pytest.raises(ValueError):
            TimeGrid(2.5, 10, 0)

    def test_no_steps_has_no_step_size(self):
        grid = TimeGrid(2.5, 0, 0)
        np.testing.assert_array_equal(grid.times, [0.0])
        with pytest.raises(ValueError):
            grid.tau


class TestHeatSolver:
    def test_equilibrium_is_stationary(self, small_mesh):
        bc = RadiationBC()
        u0 = np.full(small_mesh.node_count, bc.u_r)
        traj = solve_trajectory(u0, TimeGrid(1.0, 4, 2), uniform_diffusivity(small_mesh, 15.0), bc)
        np.testing.assert_allclose(traj.fields, bc.u_r, rtol=1e-12)

    def test_plate_warms_towards_enclosure(self, small_mesh):
        bc = RadiationBC()
        u0 = np.full(small_mesh.node_count, 293.15)
        traj = solve_trajectory(u0, TimeGrid(2.5, 10, 5), bimaterial_diffusivity(small_mesh, 15.0), bc)
        assert len(traj) == 11
        np.testing.assert_array_equal(traj.at(0), u0)
        means = traj.fields @ (assemble_mass(small_mesh) @ np.ones(small_mesh.node_count))
        assert np.all(np.diff(means) > 0)
        assert traj.fields.min() > 293.15 - 1e-2
        assert traj.fields.max() < bc.u_r + 1e-2

    def test_single_step_matches_trajectory(self, small_mesh):
        bc = RadiationBC()
        field = uniform_diffusivity(small_mesh, 15.0)
        u0 = np.full(small_mesh.node_count, 293.15)
        traj = solve_trajectory(u0, TimeGrid(1.0, 2, 1), field, bc)
        np.testing.assert_allclose(step_implicit_euler(u0, 0.5, field, bc), traj.at(1), rtol=1e-12)

    def test_non_positive_initial_state(self, small_mesh):
        u0 = np.zeros(small_mesh.node_count)
        with pytest.raises(NonPhysical):
            solve_trajectory(u0, TimeGrid(1.0, 2, 1), uniform_diffusivity(small_mesh, 15.0), RadiationBC())

    def test_non_convergence_carries_step(self, small_mesh):
        problem = HeatProblem(uniform_diffusivity(small_mesh, 15.0), RadiationBC(), max_iterations=0)
        with pytest.raises(NonConvergence) as info:
            problem.solve(np.full(small_mesh.node_count, 293.15), TimeGrid(1.0, 3, 1))
        assert info.value.step == 1


class TestTrajectory:
    def test_subsample_and_indices(self, small_mesh):
        bc = RadiationBC()
        u0 = np.full(small_mesh.node_count, 293.15)
        traj = solve_trajectory(u0, TimeGrid(1.0, 4, 2), uniform_diffusivity(small_mesh, 15.0), bc)
        sub = traj.subsample(2)
        assert len(sub) == 3
        np.testing.assert_array_equal(sub.fields[1], traj.at(2))
        np.testing.assert_array_equal(traj.indices, np.arange(5))


def mean_temperature(field, mass):
    ones = np.ones(mass.shape[0])
    return float(ones @ (mass @ field) / (ones @ (mass @ ones)))


class TestDiscreteBehaviour:
    def test_no_steps_returns_the_initial_state(self, small_mesh):
        u0 = np.full(small_mesh.node_count, 293.15)
        traj = solve_trajectory(u0, TimeGrid(1.0, 0, 0), uniform_diffusivity(small_mesh, 15.0), RadiationBC())
        assert len(traj) == 1
        np.testing.assert_array_equal(traj.at(0), u0)

    def test_newton_iterations_at_the_production_step(self):
        mesh = build_mesh(8, 8)
        problem = HeatProblem(bimaterial_diffusivity(mesh, 15.0), RadiationBC())
        u = np.full(mesh.node_count, 293.15)
        for _ in range(10):
            u, iterations = problem.step(u, 1.25e-2)
            assert iterations <= 6

    def test_temperatures_stay_between_initial_state_and_enclosure(self):
        mesh = build_mesh(16, 16)
        bc = RadiationBC()
        u0 = np.full(mesh.node_count, 293.15)
        traj = solve_trajectory(u0, TimeGrid(0.5, 40, 20), bimaterial_diffusivity(mesh, 15.0), bc)
        # consistent mass allows a small undershoot in the first steps
        assert traj.fields.min() > 293.15 - 5e-3
        assert traj.fields.max() < bc.u_r

    def test_refinement_reduces_the_mean_temperature_change(self):
        bc = RadiationBC()
        means = []
        for n in (8, 16, 32):
            mesh = build_mesh(n, n)
            u0 = np.full(mesh.node_count, 293.15)
            traj = solve_trajectory(u0, TimeGrid(2.5, 20, 10), bimaterial_diffusivity(mesh, 15.0), bc)
            means.append(mean_temperature(traj.fields[-1], assemble_mass(mesh)))
        assert abs(means[2] - means[1]) < abs(means[1] - means[0])

    @pytest.mark.slow
    def test_bimaterial_and_uniform_models_diverge(self):
        # Kelvin-scale physics: the plate warms by about 0.5 K over the horizon,
        # so relative gaps are bounded by roughly 0.5 / 293
        mesh = build_mesh(32, 32)
        bc = RadiationBC()
        grid = TimeGrid(2.5, 200, 50)
        u0 = np.full(mesh.node_count, 293.15)
        true = solve_trajectory(u0, grid, bimaterial_diffusivity(mesh, 15.0), bc).at(200)
        bk = solve_trajectory(u0, grid, uniform_diffusivity(mesh, 15.0), bc).at(200)
        mass = assemble_mass(mesh)
        diff = true - bk
        gap = np.sqrt(diff @ (mass @ diff) / (bk @ (mass @ bk)))
        assert 2e-5 < gap < 1e-4
