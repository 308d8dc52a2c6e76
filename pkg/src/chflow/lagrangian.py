"""Fixed-step RK4 integration of the flow-map system with breakdown monitoring.

The Jacobian of the flow map is the wave-breaking sentinel: theory
guarantees y_xi >= 1/2 on a small enough horizon, so the integrator warns
when the Jacobian first leaves [1/2, inf) and stops with a breakdown report
when it falls below the configured floor (default 1/4).  No continuation
past breakdown is attempted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .besov import build_filter_bank, besov_norm
from .equations import EquationSpec, rhs_lagrangian
from .exceptions import BreakdownError, NonFiniteError
from .fields import EulerianField, LagrangianState

WARN_THRESHOLD = 0.5  # edge of the guaranteed-diffeomorphism regime


@dataclass(frozen=True)
class SolverConfig:
    """Integration parameters; c_cal feeds suggested_horizon when the
    horizon is derived from the data instead of given."""

    dt: float
    horizon: float
    theta_min: float = 0.25
    c_cal: float = 0.5
    max_steps: int = 1_000_000
    snapshot_stride: int = 10

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if not 0 < self.theta_min < 0.5:
            raise ValueError("theta_min must lie in (0, 1/2)")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot stride must be at least 1")


@dataclass(frozen=True)
class BreakdownInfo:
    time: float
    xi_star: float
    min_y_xi: float


@dataclass
class Trajectory:
    """Snapshots plus one diagnostics row per accepted step."""

    states: List[LagrangianState]
    times: np.ndarray
    min_y_xi: np.ndarray
    max_y_xi: np.ndarray
    max_abs_u: np.ndarray
    max_abs_u_xi: np.ndarray
    energy: np.ndarray
    momentum: np.ndarray
    seam: np.ndarray
    breakdown: Optional[BreakdownInfo] = None
    guaranteed_exit_time: Optional[float] = None
    snapshot_stride: int = 1

    @property
    def broke_down(self) -> bool:
        return self.breakdown is not None

    @property
    def final(self) -> LagrangianState:
        return self.states[-1]


def suggested_horizon(spec: EquationSpec, field: EulerianField,
                      p: float = 2.0, c_cal: float = 0.5) -> float:
    """Smallness-time heuristic c_cal / (||u0||^{k+1} + [||eta0||^{k+1}] + 1).

    The norm is the critical one, B^{1+1/p}_{p,1} for u (and B^{1/p}_{p,1}
    for the second component); c_cal defaults to 0.5, calibrated so the
    Jacobian never leaves [1/2, infinity) on the smooth validation runs.
    """
    spec.check_field(field)
    bank = build_filter_bank(field.grid)
    denom = 1.0 + besov_norm(field.u, 1.0 + 1.0 / p, p, 1.0,
                             bank=bank).norm ** (spec.k + 1)
    if spec.has_eta:
        denom += besov_norm(field.eta, 1.0 / p, p, 1.0,
                            bank=bank).norm ** (spec.k + 1)
    return c_cal / denom


def _advance(state: LagrangianState, rates, factor: float, t_new: float) -> LagrangianState:
    v = None
    if state.has_v:
        v = state.V + factor * rates.dV
    return LagrangianState(
        xi=state.xi,
        y=state.y + factor * rates.dy,
        U=state.U + factor * rates.dU,
        y_xi=state.y_xi + factor * rates.dy_xi,
        U_xi=state.U_xi + factor * rates.dU_xi,
        V=v,
        t=t_new,
    )


def rk4_stage_rates(spec: EquationSpec, state: LagrangianState, dt: float,
                    theta_min: float = 0.25):
    """The four classical stage rates; stage states are Jacobian-checked."""
    k1 = rhs_lagrangian(spec, state, theta_floor=theta_min)
    s2 = _advance(state, k1, 0.5 * dt, state.t + 0.5 * dt)
    k2 = rhs_lagrangian(spec, s2, theta_floor=theta_min)
    s3 = _advance(state, k2, 0.5 * dt, state.t + 0.5 * dt)
    k3 = rhs_lagrangian(spec, s3, theta_floor=theta_min)
    s4 = _advance(state, k3, dt, state.t + dt)
    k4 = rhs_lagrangian(spec, s4, theta_floor=theta_min)
    return k1, k2, k3, k4


def step_rk4(spec: EquationSpec, state: LagrangianState, dt: float,
             theta_min: float = 0.25) -> LagrangianState:
    """One classical Runge-Kutta step of the full flow-map system."""
    k1, k2, k3, k4 = rk4_stage_rates(spec, state, dt, theta_min)
    sixth = dt / 6.0

    def combine(a, b, c, d):
        return sixth * (a + 2.0 * b + 2.0 * c + d)

    v = None
    if state.has_v:
        v = state.V + combine(k1.dV, k2.dV, k3.dV, k4.dV)
    return LagrangianState(
        xi=state.xi,
        y=state.y + combine(k1.dy, k2.dy, k3.dy, k4.dy),
        U=state.U + combine(k1.dU, k2.dU, k3.dU, k4.dU),
        y_xi=state.y_xi + combine(k1.dy_xi, k2.dy_xi, k3.dy_xi, k4.dy_xi),
        U_xi=state.U_xi + combine(k1.dU_xi, k2.dU_xi, k3.dU_xi, k4.dU_xi),
        V=v,
        t=state.t + dt,
    )


def _lagrangian_energy(state: LagrangianState) -> float:
    # change of variables: int u^2 + u_x^2 dx = int U^2 y_xi + U_xi^2 / y_xi dxi
    h = state.spacing
    return float(h * np.sum(state.U**2 * state.y_xi + state.U_xi**2 / state.y_xi))


def _lagrangian_momentum(state: LagrangianState) -> float:
    return float(state.spacing * np.sum(state.U * state.y_xi))


def integrate(spec: EquationSpec, state0: LagrangianState,
              config: SolverConfig) -> Trajectory:
    """Advance to the horizon or to breakdown, recording diagnostics per step."""
    n_steps = max(1, int(round(config.horizon / config.dt)))
    if n_steps > config.max_steps:
        raise ValueError("horizon/dt exceeds max_steps")
    dt_last = config.horizon - (n_steps - 1) * config.dt
    if dt_last <= 0:
        n_steps -= 1
        dt_last = config.horizon - (n_steps - 1) * config.dt

    accepted = state0
    states = [state0]
    diag = {name: [] for name in ("t", "min", "max", "u", "uxi", "e", "m", "seam")}
    breakdown = None
    warn_time = None

    for step in range(1, n_steps + 1):
        dt = config.dt if step < n_steps else dt_last
        try:
            candidate = step_rk4(spec, accepted, dt, theta_min=config.theta_min)
        except BreakdownError as err:
            breakdown = BreakdownInfo(
                time=err.time if err.time is not None else accepted.t,
                xi_star=err.xi_star if err.xi_star is not None else float("nan"),
                min_y_xi=err.min_y_xi if err.min_y_xi is not None else float("nan"),
            )
            break
        if not np.all(np.isfinite(candidate.U)):
            raise NonFiniteError(f"state lost finiteness at t = {candidate.t}")
        m = candidate.min_y_xi()
        if m < config.theta_min:
            breakdown = BreakdownInfo(
                time=candidate.t,
                xi_star=float(candidate.xi[int(np.argmin(candidate.y_xi))]),
                min_y_xi=m,
            )
            break
        accepted = candidate
        if warn_time is None and m < WARN_THRESHOLD:
            warn_time = accepted.t
        diag["t"].append(accepted.t)
        diag["min"].append(m)
        diag["max"].append(float(np.max(accepted.y_xi)))
        diag["u"].append(float(np.max(np.abs(accepted.U))))
        diag["uxi"].append(float(np.max(np.abs(accepted.U_xi))))
        diag["e"].append(_lagrangian_energy(accepted))
        diag["m"].append(_lagrangian_momentum(accepted))
        diag["seam"].append(float(max(abs(accepted.U[0]), abs(accepted.U[-1]))))
        if step % config.snapshot_stride == 0 or step == n_steps:
            states.append(accepted)

    if states[-1] is not accepted:
        states.append(accepted)

    return Trajectory(
        states=states,
        times=np.array(diag["t"]),
        min_y_xi=np.array(diag["min"]),
        max_y_xi=np.array(diag["max"]),
        max_abs_u=np.array(diag["u"]),
        max_abs_u_xi=np.array(diag["uxi"]),
        energy=np.array(diag["e"]),
        momentum=np.array(diag["m"]),
        seam=np.array(diag["seam"]),
        breakdown=breakdown,
        guaranteed_exit_time=warn_time,
        snapshot_stride=config.snapshot_stride,
    )


def write_trajectory_jsonl(traj: Trajectory, path, state_csv_paths=None) -> None:
    """One line per diagnostics row; snapshot rows may point at full-state CSVs."""
    snapshot_times = {round(s.t, 12): i for i, s in enumerate(traj.states)}
    with open(path, "w") as fh:
        for i in range(traj.times.size):
            row = {
                "t": traj.times[i],
                "min_y_xi": traj.min_y_xi[i],
                "max_y_xi": traj.max_y_xi[i],
                "max_abs_u": traj.max_abs_u[i],
                "max_abs_u_xi": traj.max_abs_u_xi[i],
                "h1_energy": traj.energy[i],
                "momentum": traj.momentum[i],
                "seam_amplitude": traj.seam[i],
            }
            key = round(traj.times[i], 12)
            if state_csv_paths and key in snapshot_times:
                idx = snapshot_times[key]
                if idx < len(state_csv_paths):
                    row["state_csv"] = str(state_csv_paths[idx])
            fh.write(json.dumps(row) + "\n")
        if traj.breakdown is not None:
            fh.write(json.dumps({
                "breakdown": True,
                "t": traj.breakdown.time,
                "xi_star": traj.breakdown.xi_star,
                "min_y_xi": traj.breakdown.min_y_xi,
            }) + "\n")
