"""The three families: local/nonlocal assembly and the two formulations."""

import numpy as np
import pytest

from chflow.besov import besov_norm, build_filter_bank, random_corpus
from chflow.equations import (
    EquationSpec,
    eulerian_source,
    rhs_eulerian,
    rhs_lagrangian,
)
from chflow.exceptions import BreakdownError
from chflow.fields import EulerianField, Grid1D, to_lagrangian
from chflow.peakon import PeakonEnsemble, mollify, sample_field

from conftest import gaussian_field

ALL_SPECS = [EquationSpec.camassa_holm(), EquationSpec.novikov(),
             EquationSpec.two_component()]


def make_field(spec, grid, amplitude=0.5, eta_amplitude=0.1):
    x = grid.points
    eta = eta_amplitude * np.exp(-((x - 1.0) ** 2)) if spec.has_eta else None
    return EulerianField(grid=grid, u=amplitude * np.exp(-(x**2)), eta=eta)


class TestEquationSpec:
    def test_family_constants(self):
        ch, nov, tch = ALL_SPECS
        assert (ch.degree, ch.k) == (1, 1)
        assert (nov.degree, nov.k) == (2, 2)
        assert (tch.degree, tch.k, tch.h_coeffs) == (1, 1, (1.0, 1.0))

    def test_from_tag_rejects_unknown(self):
        with pytest.raises(ValueError, match="unknown equation family"):
            EquationSpec.from_tag("kdv")

    def test_field_shape_mismatch(self, grid):
        ch = EquationSpec.camassa_holm()
        field_eta = make_field(EquationSpec.two_component(), grid)
        with pytest.raises(ValueError, match="does not match family"):
            rhs_eulerian(ch, field_eta)
        with pytest.raises(ValueError, match="does not match family"):
            rhs_lagrangian(EquationSpec.two_component(),
                           to_lagrangian(gaussian_field(grid)))


class TestEulerianRhs:
    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family)
    def test_zero_field_gives_zero(self, spec, grid):
        eta = np.zeros(grid.count) if spec.has_eta else None
        field = EulerianField(grid=grid, u=np.zeros(grid.count), eta=eta)
        rates = rhs_eulerian(spec, field)
        assert np.all(rates.du == 0)
        if spec.has_eta:
            assert np.all(rates.deta == 0)

    def test_ch_constant_field(self, grid):
        field = EulerianField(grid=grid, u=np.full(grid.count, 0.7))
        rates = rhs_eulerian(EquationSpec.camassa_holm(), field)
        assert np.max(np.abs(rates.du)) <= 1e-14

    def test_ch_traveling_wave_residual_shrinks_with_mollification(self):
        # exact peakons satisfy u_t = -c u_x; for the mollified profile the
        # residual of -c u_x = -u u_x + F(u) vanishes away from the crest
        grid = Grid1D(40.0, 4096)
        spec = EquationSpec.camassa_holm()
        x = grid.points
        away = np.abs(x) > 0.5
        residuals = []
        for delta in (0.4, 0.1, 0.02):
            field = mollify(sample_field(PeakonEnsemble(p=[1.0], q=[0.0]), grid),
                            delta)
            rates = rhs_eulerian(spec, field)
            ux = field.u_x()
            residuals.append(np.max(np.abs(rates.du + 1.0 * ux)[away]))
        assert residuals[0] > residuals[1] > residuals[2]
        assert residuals[-1] <= 1.5e-2


class TestLagrangianRhs:
    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.family)
    def test_zero_state_gives_zero(self, spec, grid):
        eta = np.zeros(grid.count) if spec.has_eta else None
        field = EulerianField(grid=grid, u=np.zeros(grid.count), eta=eta)
        rates = rhs_lagrangian(spec, to_lagrangian(field))
        assert np.all(rates.dU == 0) and np.all(rates.dU_xi == 0)
        assert np.all(rates.dy == 0) and np.all(rates.dy_xi == 0)
        if spec.has_eta:
            assert np.all(rates.dV == 0)

    def test_ch_matches_double_sum_oracle(self):
        # the discrete rates are kernel sums over the nodes; evaluate the
        # same sums O(N^2) with sign(0) = 0 on a two-peakon state
        grid = Grid1D(40.0, 256)
        spec = EquationSpec.camassa_holm()
        field = sample_field(PeakonEnsemble(p=[1.0, 1.0], q=[-4.0, 4.0]), grid)
        state = to_lagrangian(field)
        rates = rhs_lagrangian(spec, state)

        w = (state.U**2 * state.y_xi
             + 0.5 * state.U_xi**2 / state.y_xi) * state.spacing
        signs = np.sign(state.y[:, None] - state.y[None, :])
        decay = np.exp(-np.abs(state.y[:, None] - state.y[None, :]))
        dU_oracle = 0.5 * ((signs * decay) @ w)
        dUxi_oracle = (w / state.spacing
                       - state.y_xi * 0.5 * (decay @ w))
        scale = np.max(np.abs(dU_oracle))
        assert np.max(np.abs(rates.dU - dU_oracle)) <= 1e-12 * scale
        assert np.max(np.abs(rates.dU_xi - dUxi_oracle)) <= 1e-12 * np.max(np.abs(dUxi_oracle))

    @pytest.mark.parametrize("spec,amps,tol", [
        (EquationSpec.camassa_holm(), (0.15, None), 1e-6),
        (EquationSpec.novikov(), (0.15, None), 1e-6),
        (EquationSpec.two_component(), (0.15, 0.025), 1e-6),
    ], ids=lambda v: getattr(v, "family", None) or str(v))
    def test_cross_formulation_consistency(self, spec, amps, tol):
        # at t = 0 the flow-map rate dU/dt must reproduce the Eulerian
        # source F(u) pointwise; trapezoid quadrature of the kernel kink
        # limits agreement to O(dxi^2)
        grid = Grid1D(40.0, 2048)
        amp, eta_amp = amps
        field = make_field(spec, grid, amplitude=amp,
                           eta_amplitude=eta_amp or 0.0)
        rates = rhs_lagrangian(spec, to_lagrangian(field))
        source = eulerian_source(spec, field)
        assert np.max(np.abs(rates.dU - source.du)) <= tol
        if spec.has_eta:
            assert np.max(np.abs(rates.dV - source.deta)) <= 1e-14

    def test_cross_formulation_error_is_second_order(self):
        spec = EquationSpec.camassa_holm()
        errs = []
        for n in (1024, 2048):
            grid = Grid1D(40.0, n)
            field = make_field(spec, grid, amplitude=0.5)
            rates = rhs_lagrangian(spec, to_lagrangian(field))
            errs.append(np.max(np.abs(rates.dU - eulerian_source(spec, field).du)))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.25)

    def test_xi_derivative_compatibility(self):
        # finite difference of dU across labels tracks dU_xi at O(dxi^2)
        spec = EquationSpec.camassa_holm()
        errs = []
        for n in (1024, 2048):
            grid = Grid1D(40.0, n)
            state = to_lagrangian(make_field(spec, grid, amplitude=0.5))
            rates = rhs_lagrangian(spec, state)
            fd = np.gradient(rates.dU, state.spacing)
            errs.append(np.max(np.abs(fd - rates.dU_xi)))
        assert errs[1] <= 1e-4
        assert errs[0] / errs[1] >= 3.0

    def test_jacobian_floor_raises_breakdown(self, grid):
        state = to_lagrangian(gaussian_field(grid))
        squeezed = type(state)(
            xi=state.xi, y=state.y, U=state.U,
            y_xi=np.full(grid.count, 0.05), U_xi=state.U_xi, t=0.0,
        )
        with pytest.raises(BreakdownError):
            rhs_lagrangian(EquationSpec.camassa_holm(), squeezed,
                           theta_floor=0.25)


def test_growth_bound_empirical_constant():
    """||F(u)|| <= C (||u||^{k+1} + 1) in the critical norm, C finite."""
    grid = Grid1D(40.0, 1024)
    bank = build_filter_bank(grid)
    corpus = random_corpus(grid, 30, seed=20)
    p = 2.0
    for spec in (EquationSpec.camassa_holm(), EquationSpec.novikov()):
        ratios = []
        for u in corpus:
            field = EulerianField(grid=grid, u=u)
            source = eulerian_source(spec, field)
            num = besov_norm(source.du, 1.5, p, 1.0, bank=bank).norm
            den = besov_norm(u, 1.5, p, 1.0, bank=bank).norm ** (spec.k + 1) + 1.0
            ratios.append(num / den)
        empirical_c = max(ratios)
        assert np.isfinite(empirical_c)
        assert empirical_c < 50.0