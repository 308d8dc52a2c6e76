"""Pseudospectral reference solver and the linear-transport iteration."""

import numpy as np
import pytest

from chflow.besov import besov_norm, build_filter_bank
from chflow.equations import EquationSpec
from chflow.fields import EulerianField, Grid1D, push_forward, to_lagrangian
from chflow.lagrangian import SolverConfig, integrate, suggested_horizon
from chflow.reference import (
    eulerian_run,
    eulerian_step,
    picard_iterate,
    write_picard_csv,
)

from conftest import gaussian_field

CH = EquationSpec.camassa_holm()


class TestEulerianStep:
    def test_zero_stays_zero(self, grid):
        field = EulerianField(grid=grid, u=np.zeros(grid.count))
        out = eulerian_step(CH, field, 1e-2)
        assert np.all(out.u == 0)

    def test_small_sine_self_converges_at_order_four(self):
        # amplitude and horizon chosen so the dt ladder sits well above
        # round-off; weaker data pushes the differences below 1e-15
        grid = Grid1D(40.0, 1024)
        x = grid.points
        k = 2 * np.pi / 40 * 16
        field = EulerianField(grid=grid, u=0.4 * np.sin(k * x) * np.exp(-(x / 4) ** 2))
        finals = []
        for dt in (8e-3, 4e-3, 2e-3):
            finals.append(eulerian_run(CH, field, dt, 0.48,
                                       snapshot_stride=10**9)[-1].u)
        d1 = np.max(np.abs(finals[0] - finals[1]))
        d2 = np.max(np.abs(finals[1] - finals[2]))
        assert d1 > 1e-13
        assert np.log2(d1 / d2) >= 3.5

    def test_cross_checks_lagrangian_solver(self):
        grid = Grid1D(40.0, 1024)
        field = gaussian_field(grid, amplitude=0.5)
        horizon = 0.3
        reference = eulerian_run(CH, field, 1e-3, horizon,
                                 snapshot_stride=10**9)[-1]
        traj = integrate(CH, to_lagrangian(field),
                         SolverConfig(dt=1e-3, horizon=horizon,
                                      snapshot_stride=10**6))
        pushed = push_forward(traj.final, grid)
        assert np.max(np.abs(pushed.u - reference.u)) <= 1e-4

    def test_two_component_step_runs(self, grid):
        spec = EquationSpec.two_component()
        x = grid.points
        field = EulerianField(grid=grid, u=0.2 * np.exp(-(x**2)),
                              eta=0.1 * np.exp(-((x - 1) ** 2)))
        out = eulerian_step(spec, field, 1e-3)
        assert out.eta is not None and np.all(np.isfinite(out.eta))


class TestPicard:
    def test_zero_data_converges_immediately(self, grid):
        field = EulerianField(grid=grid, u=np.zeros(grid.count))
        report = picard_iterate(CH, field, horizon=0.25, dt=5e-3)
        assert report.converged
        assert report.iterations == 1
        assert report.increments[0] == 0.0
        assert np.all(report.final.u == 0)

    def test_first_iterate_is_exact_linear_transport(self):
        # with the zero initial iterate the transport speed and source both
        # vanish, so the first iterate must reproduce u0 exactly
        grid = Grid1D(40.0, 512)
        field = gaussian_field(grid, amplitude=0.4)
        report = picard_iterate(CH, field, horizon=0.1, dt=5e-3, n_max=1)
        assert np.array_equal(report.final.u, field.u)

    def test_contraction_and_limit(self):
        grid = Grid1D(40.0, 1024)
        field = gaussian_field(grid, amplitude=0.5)
        horizon = suggested_horizon(CH, field)
        report = picard_iterate(CH, field, horizon=horizon, dt=2e-3,
                                n_max=25, tol=1e-10)
        assert report.converged
        ratios = report.increments[1:] / report.increments[:-1]
        assert np.all(ratios[2:] <= 0.8)
        reference = eulerian_run(CH, field, 1e-3, horizon,
                                 snapshot_stride=10**9)[-1]
        assert np.max(np.abs(report.final.u - reference.u)) <= 1e-4

    def test_iterates_stay_uniformly_bounded(self):
        grid = Grid1D(40.0, 1024)
        bank = build_filter_bank(grid)
        field = gaussian_field(grid, amplitude=0.5)
        u0_norm = besov_norm(field.u, 1.5, 2.0, 1.0, bank=bank).norm
        horizon = suggested_horizon(CH, field)

        # re-run the iteration capturing the high norm of each iterate's
        # final field (the sup over the time grid is dominated by it here)
        report = picard_iterate(CH, field, horizon=horizon, dt=2e-3, n_max=12)
        final_norm = besov_norm(report.final.u, 1.5, 2.0, 1.0, bank=bank).norm
        assert final_norm <= 2.0 * u0_norm + 1.0

    def test_requires_time_zero(self, grid):
        field = EulerianField(grid=grid, u=np.zeros(grid.count), t=0.5)
        with pytest.raises(ValueError):
            picard_iterate(CH, field, horizon=0.1)

    def test_two_component_contracts(self):
        grid = Grid1D(40.0, 512)
        spec = EquationSpec.two_component()
        x = grid.points
        field = EulerianField(grid=grid, u=0.2 * np.exp(-(x**2)),
                              eta=0.1 * np.exp(-((x - 1) ** 2)))
        report = picard_iterate(spec, field, horizon=0.2, dt=5e-3, n_max=20)
        assert report.converged

    def test_csv_export(self, tmp_path):
        grid = Grid1D(40.0, 512)
        field = gaussian_field(grid, amplitude=0.3)
        report = picard_iterate(CH, field, horizon=0.1, dt=5e-3, n_max=6)
        path = tmp_path / "picard.csv"
        write_picard_csv(report, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "n,increment"
        assert len(lines) == report.increments.size + 1
