"""Scripted experiments probing stability, continuous dependence, and the
Lipschitz-norm discontinuity of the peakon solution map.

All experiments are deterministic: fixed initial data, fixed time steps,
fixed ladders.  Constants that theory leaves non-constructive (stability
and dependence constants) are measured outputs, never asserted inputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .besov import build_filter_bank, besov_norm
from .equations import EquationSpec
from .fields import (
    EulerianField,
    Grid1D,
    LagrangianState,
    intersection_norm,
    norm_report,
    push_forward,
    to_lagrangian,
    trapezoid_lp,
)
from .lagrangian import SolverConfig, integrate


def _lagrangian_distance(a: LagrangianState, b: LagrangianState, p: float) -> float:
    """||U1-U2|| + ||y1-y2|| in the W^{1,inf} int W^{1,p} metric over labels."""
    h = a.spacing
    du = norm_report(a.U - b.U, a.U_xi - b.U_xi, h, p)
    dy = norm_report(a.y - b.y, a.y_xi - b.y_xi, h, p)
    return intersection_norm(du) + intersection_norm(dy)


@dataclass(frozen=True)
class StabilityRow:
    eps: float
    p: float
    initial_besov: float
    initial_distance: float
    rho: float
    partial: bool


@dataclass
class StabilityReport:
    rows: List[StabilityRow]
    times: np.ndarray
    lagrangian_distance: Dict[Tuple[float, float], np.ndarray]
    eulerian_lp_distance: Dict[Tuple[float, float], np.ndarray]

    def rho_spread(self, p: float) -> float:
        """max/min of the per-epsilon amplification factors at one p."""
        values = [row.rho for row in self.rows if row.p == p and row.rho > 0]
        return max(values) / min(values) if values else float("nan")


def stability_experiment(spec: EquationSpec, u0: EulerianField,
                         perturbation: EulerianField,
                         eps_ladder: Sequence[float], horizon: float,
                         dt: float = 1e-3,
                         p_values: Sequence[float] = (2.0, 3.0),
                         snapshot_stride: int = 25) -> StabilityReport:
    """Run base and perturbed data, tabulating distance amplification per eps.

    rho(eps) = sup_{t<=T} distance(t)/distance(0) in the combined Lagrangian
    metric; the Eulerian L^p distances of the pushed-forward fields ride
    along for reference.
    """
    eps_ladder = list(eps_ladder)
    if any(e2 >= e1 for e1, e2 in zip(eps_ladder, eps_ladder[1:])):
        raise ValueError("eps ladder must be strictly decreasing")
    grid = u0.grid
    bank = build_filter_bank(grid)
    config = SolverConfig(dt=dt, horizon=horizon, snapshot_stride=snapshot_stride)
    base = integrate(spec, to_lagrangian(u0), config)
    base_times = np.array([s.t for s in base.states])

    rows: List[StabilityRow] = []
    lagr: Dict[Tuple[float, float], np.ndarray] = {}
    euler: Dict[Tuple[float, float], np.ndarray] = {}
    for eps in eps_ladder:
        data = EulerianField(grid=grid, u=u0.u + eps * perturbation.u,
                             eta=u0.eta, t=0.0)
        run = integrate(spec, to_lagrangian(data), config)
        partial = run.broke_down or base.broke_down
        n_common = min(len(base.states), len(run.states))
        times = base_times[:n_common]
        for p in p_values:
            dists = np.array([
                _lagrangian_distance(base.states[i], run.states[i], p)
                for i in range(n_common)
            ])
            lp_dists = np.array([
                trapezoid_lp(push_forward(base.states[i], grid).u
                             - push_forward(run.states[i], grid).u,
                             grid.spacing, p)
                for i in range(n_common)
            ])
            lagr[(eps, p)] = dists
            euler[(eps, p)] = lp_dists
            d0 = dists[0]
            rho = float(np.max(dists) / d0) if d0 > 0 else (
                1.0 if np.max(dists) == 0 else float("inf"))
            init_besov = besov_norm(data.u - u0.u, 1.0 + 1.0 / p, p, 1.0,
                                    bank=bank).norm
            rows.append(StabilityRow(eps=eps, p=p, initial_besov=init_besov,
                                     initial_distance=d0, rho=rho,
                                     partial=partial))
    return StabilityReport(rows=rows, times=base_times,
                           lagrangian_distance=lagr,
                           eulerian_lp_distance=euler)


def write_stability_csv(report: StabilityReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "p", "initial_besov", "initial_distance",
                         "rho", "partial"])
        for r in report.rows:
            writer.writerow([f"{r.eps:.17g}", f"{r.p:.17g}",
                             f"{r.initial_besov:.17g}",
                             f"{r.initial_distance:.17g}",
                             f"{r.rho:.17g}", int(r.partial)])


def write_stability_jsonl(report: StabilityReport, path) -> None:
    with open(path, "w") as fh:
        for (eps, p), dists in sorted(report.lagrangian_distance.items()):
            fh.write(json.dumps({
                "eps": eps,
                "p": p,
                "t": [float(v) for v in report.times[:len(dists)]],
                "lagrangian_distance": [float(v) for v in dists],
                "eulerian_lp_distance": [float(v) for v in
                                         report.eulerian_lp_distance[(eps, p)]],
            }) + "\n")


@dataclass(frozen=True)
class DependenceRow:
    m: float  # ladder index; +inf encodes the constant sequence
    initial_high: float
    sup_high: float
    sup_low: float
    sup_norm_high: float
    partial: bool


def continuous_dependence_experiment(spec: EquationSpec, u0: EulerianField,
                                     m_values: Sequence[int], horizon: float,
                                     dt: float = 1e-3, p: float = 2.0,
                                     snapshot_stride: int = 25) -> List[DependenceRow]:
    """Amplitude ladder u0^m = (1 + 2^{-m}) u0 converging to u0.

    Tabulates sup-in-time distances of the solutions to the limit run, in
    the high critical norm B^{1+1/p}_{p,1} and the low norm B^{1/p}_{p,1};
    the high norm of each perturbed solution rides along as the bounded
    column.
    """
    grid = u0.grid
    bank = build_filter_bank(grid)
    config = SolverConfig(dt=dt, horizon=horizon, snapshot_stride=snapshot_stride)
    limit = integrate(spec, to_lagrangian(u0), config)
    limit_fields = [push_forward(s, grid) for s in limit.states]
    s_high = 1.0 + 1.0 / p
    s_low = 1.0 / p

    rows: List[DependenceRow] = []
    for m in m_values:
        m = float(m)
        data = EulerianField(grid=grid, u=(1.0 + 2.0**(-m)) * u0.u,
                             eta=u0.eta, t=0.0)
        run = integrate(spec, to_lagrangian(data), config)
        fields = [push_forward(s, grid) for s in run.states]
        n_common = min(len(fields), len(limit_fields))
        d_high = [besov_norm(fields[i].u - limit_fields[i].u, s_high, p, 1.0,
                             bank=bank).norm for i in range(n_common)]
        d_low = [besov_norm(fields[i].u - limit_fields[i].u, s_low, p, 1.0,
                            bank=bank).norm for i in range(n_common)]
        n_high = [besov_norm(fields[i].u, s_high, p, 1.0, bank=bank).norm
                  for i in range(n_common)]
        rows.append(DependenceRow(
            m=m,
            initial_high=besov_norm(data.u - u0.u, s_high, p, 1.0, bank=bank).norm,
            sup_high=float(np.max(d_high)),
            sup_low=float(np.max(d_low)),
            sup_norm_high=float(np.max(n_high)),
            partial=run.broke_down or limit.broke_down,
        ))
    return rows


def write_dependence_csv(rows: Sequence[DependenceRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "initial_high", "sup_high", "sup_low",
                         "sup_norm_high", "partial"])
        for r in rows:
            writer.writerow([r.m, f"{r.initial_high:.17g}", f"{r.sup_high:.17g}",
                             f"{r.sup_low:.17g}", f"{r.sup_norm_high:.17g}",
                             int(r.partial)])


@dataclass(frozen=True)
class DiscontinuityRow:
    eps: float
    w1inf_initial: float
    w1inf_final: float
    w1inf_ratio: float
    l2_initial: float
    l2_final: float
    l2_ratio: float


def _peakon_profile(c: float, x: np.ndarray, t: float) -> np.ndarray:
    return c * np.exp(-np.abs(x - c * t))


def _peakon_slope(c: float, x: np.ndarray, t: float) -> np.ndarray:
    return -c * np.sign(x - c * t) * np.exp(-np.abs(x - c * t))


def w1inf_discontinuity_demo(c: float, eps_ladder: Sequence[float],
                             t: float = 1.0, length: float = 40.0,
                             count: int = 2**17) -> List[DiscontinuityRow]:
    """Exact peakon pairs with speeds c and c+eps, no PDE solve involved.

    The sup norms are evaluated on a dense grid refined between the two
    crests (where the slope mismatch of order 2c lives); L^2 distances use
    the plain dense grid.  Shrinking eps sends the Lipschitz-norm ratio to
    infinity while the L^2 ratio stays bounded.
    """
    x_dense = np.linspace(-length / 2, length / 2, count, endpoint=False)
    rows: List[DiscontinuityRow] = []
    for eps in eps_ladder:
        c2 = c + eps
        if eps > 0:
            between = np.linspace(c * t, c2 * t, 17)[1:-1]
            x_sup = np.sort(np.concatenate((
                x_dense, between,
                [c * t - 1e-9, c * t + 1e-9, c2 * t - 1e-9, c2 * t + 1e-9],
            )))
        else:
            x_sup = x_dense

        def w1inf_dist(tt):
            du = _peakon_profile(c, x_sup, tt) - _peakon_profile(c2, x_sup, tt)
            ds = _peakon_slope(c, x_sup, tt) - _peakon_slope(c2, x_sup, tt)
            return float(max(np.max(np.abs(du)), np.max(np.abs(ds))))

        def l2_dist(tt):
            du = _peakon_profile(c, x_dense, tt) - _peakon_profile(c2, x_dense, tt)
            return trapezoid_lp(du, length / count, 2.0)

        w0, wt = w1inf_dist(0.0), w1inf_dist(t)
        l0, lt = l2_dist(0.0), l2_dist(t)
        rows.append(DiscontinuityRow(
            eps=eps,
            w1inf_initial=w0,
            w1inf_final=wt,
            w1inf_ratio=wt / w0 if w0 > 0 else 1.0,
            l2_initial=l0,
            l2_final=lt,
            l2_ratio=lt / l0 if l0 > 0 else 1.0,
        ))
    return rows


def write_discontinuity_csv(rows: Sequence[DiscontinuityRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eps", "w1inf_initial", "w1inf_final", "w1inf_ratio",
                         "l2_initial", "l2_final", "l2_ratio"])
        for r in rows:
            writer.writerow([f"{r.eps:.17g}", f"{r.w1inf_initial:.17g}",
                             f"{r.w1inf_final:.17g}", f"{r.w1inf_ratio:.17g}",
                             f"{r.l2_initial:.17g}", f"{r.l2_final:.17g}",
                             f"{r.l2_ratio:.17g}"])
