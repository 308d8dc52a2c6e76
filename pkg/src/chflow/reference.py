"""Independent Eulerian solvers used to cross-validate the flow-map core.

Two schemes share this module: a dealiased pseudospectral RK4 solver for
the full nonlinear equations, and the linear-transport iteration that
builds the solution as a fixed point.  The iteration freezes the transport
speed and the source at the previous iterate and solves each resulting
linear problem semi-Lagrangianly, tracing characteristic feet backwards
one step at a time and accumulating the source along the path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ._interp import periodic_hermite_eval
from .besov import FilterBank, besov_norm, build_filter_bank
from .equations import EquationSpec, eulerian_source, rhs_eulerian
from .exceptions import NonFiniteError
from .fields import EulerianField, Grid1D, dealias_projection


def _project_rates(grid: Grid1D, rates):
    du = dealias_projection(grid, rates.du)
    deta = None if rates.deta is None else dealias_projection(grid, rates.deta)
    return du, deta


def eulerian_step(spec: EquationSpec, field: EulerianField, dt: float) -> EulerianField:
    """One RK4 step of u_t = -A(u) u_x + F(u) with 2/3-rule dealiasing."""
    spec.check_field(field)
    grid = field.grid

    def rates_at(u, eta, t):
        probe = EulerianField(grid=grid, u=u, eta=eta, t=t)
        return _project_rates(grid, rhs_eulerian(spec, probe))

    u0, e0, t0 = field.u, field.eta, field.t
    k1u, k1e = rates_at(u0, e0, t0)
    k2u, k2e = rates_at(u0 + 0.5 * dt * k1u,
                        None if e0 is None else e0 + 0.5 * dt * k1e,
                        t0 + 0.5 * dt)
    k3u, k3e = rates_at(u0 + 0.5 * dt * k2u,
                        None if e0 is None else e0 + 0.5 * dt * k2e,
                        t0 + 0.5 * dt)
    k4u, k4e = rates_at(u0 + dt * k3u,
                        None if e0 is None else e0 + dt * k3e,
                        t0 + dt)
    u_new = u0 + dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
    if not np.all(np.isfinite(u_new)):
        raise NonFiniteError(f"spectrum blew up at t = {t0 + dt}")
    eta_new = None
    if e0 is not None:
        eta_new = e0 + dt / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e)
        if not np.all(np.isfinite(eta_new)):
            raise NonFiniteError(f"eta blew up at t = {t0 + dt}")
    return EulerianField(grid=grid, u=u_new, eta=eta_new, t=t0 + dt)


def eulerian_run(spec: EquationSpec, field: EulerianField, dt: float,
                 horizon: float, snapshot_stride: int = 1) -> List[EulerianField]:
    """March to the horizon, returning snapshots (initial field included)."""
    n_steps = max(1, int(round(horizon / dt)))
    dt_last = horizon - (n_steps - 1) * dt
    if dt_last <= 0:
        n_steps -= 1
        dt_last = horizon - (n_steps - 1) * dt
    snapshots = [field]
    current = field
    for step in range(1, n_steps + 1):
        current = eulerian_step(spec, current, dt if step < n_steps else dt_last)
        if step % snapshot_stride == 0 or step == n_steps:
            snapshots.append(current)
    return snapshots


@dataclass(frozen=True)
class PicardReport:
    """Convergence record of the linear-transport iteration."""

    iterations: int
    increments: np.ndarray
    converged: bool
    final: EulerianField
    times: np.ndarray


def _slopes(grid: Grid1D, rows: np.ndarray) -> np.ndarray:
    spec = np.fft.rfft(rows, axis=-1)
    spec *= 1j * grid.wavenumbers
    spec[..., -1] = 0.0
    return np.fft.irfft(spec, n=grid.count, axis=-1)


def _trace_feet(grid: Grid1D, x: np.ndarray, dt: float,
                coeff_lo, coeff_hi) -> np.ndarray:
    """RK4 backwards over one step through the frozen transport field.

    coeff_lo/hi are (values, slopes) snapshots at the step endpoints; the
    field is interpolated linearly in time between them.
    """
    L = grid.length

    def speed(pos, theta):
        # theta = 0 at the new time level, 1 at the old one
        u_hi = periodic_hermite_eval(grid.points, coeff_hi[0], coeff_hi[1], L, pos)
        u_lo = periodic_hermite_eval(grid.points, coeff_lo[0], coeff_lo[1], L, pos)
        return (1.0 - theta) * u_hi + theta * u_lo

    k1 = speed(x, 0.0)
    k2 = speed(x - 0.5 * dt * k1, 0.5)
    k3 = speed(x - 0.5 * dt * k2, 0.5)
    k4 = speed(x - dt * k3, 1.0)
    return x - dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def picard_iterate(spec: EquationSpec, u0_field: EulerianField,
                   n_max: int = 20, tol: float = 1e-8,
                   dt: float = 1e-3, horizon: Optional[float] = None,
                   p: float = 2.0,
                   bank: Optional[FilterBank] = None) -> PicardReport:
    """Iterate linear transport problems starting from the zero iterate.

    Iterate n+1 solves  v_t + A(u^n) v_x = F(u^n),  v(0) = u0  by backward
    characteristic tracing; increments between consecutive iterates are
    measured in the low critical norm B^{1/p}_{p,1}, sup over the time grid.
    """
    spec.check_field(u0_field)
    if u0_field.t != 0.0:
        raise ValueError("the iteration starts from data at t = 0")
    grid = u0_field.grid
    if horizon is None:
        from .lagrangian import suggested_horizon

        horizon = suggested_horizon(spec, u0_field, p=p)
    if bank is None:
        bank = build_filter_bank(grid)
    n_steps = max(1, int(round(horizon / dt)))
    times = np.linspace(0.0, horizon, n_steps + 1)
    dts = np.diff(times)
    x = grid.points
    n = grid.count
    has_eta = spec.has_eta

    # iterate 0 is identically zero
    u_curr = np.zeros((n_steps + 1, n))
    eta_curr = np.zeros((n_steps + 1, n)) if has_eta else None

    increments = []
    converged = False
    iterations = 0

    for iteration in range(1, n_max + 1):
        iterations = iteration
        # transport speed A(u^n) and sources frozen at the current iterate
        speed_rows = spec.transport(u_curr)
        speed_slopes = _slopes(grid, speed_rows)
        src_u = np.empty_like(u_curr)
        src_eta = np.empty_like(u_curr) if has_eta else None
        for m in range(n_steps + 1):
            probe = EulerianField(grid=grid, u=u_curr[m],
                                  eta=None if not has_eta else eta_curr[m],
                                  t=times[m])
            rates = eulerian_source(spec, probe)
            src_u[m] = rates.du
            if has_eta:
                src_eta[m] = rates.deta
        src_u_slopes = _slopes(grid, src_u)
        src_eta_slopes = _slopes(grid, src_eta) if has_eta else None

        u_next = np.empty_like(u_curr)
        u_next[0] = u0_field.u
        eta_next = None
        if has_eta:
            eta_next = np.empty_like(eta_curr)
            eta_next[0] = u0_field.eta
        row_slopes = _slopes(grid, u_next[0])
        eta_row_slopes = _slopes(grid, eta_next[0]) if has_eta else None

        for m in range(n_steps):
            step_dt = dts[m]
            feet = _trace_feet(grid, x, step_dt,
                               (speed_rows[m], speed_slopes[m]),
                               (speed_rows[m + 1], speed_slopes[m + 1]))
            carried = periodic_hermite_eval(x, u_next[m], row_slopes, grid.length, feet)
            src_at_feet = periodic_hermite_eval(x, src_u[m], src_u_slopes[m],
                                                grid.length, feet)
            u_next[m + 1] = carried + 0.5 * step_dt * (src_at_feet + src_u[m + 1])
            row_slopes = _slopes(grid, u_next[m + 1])
            if has_eta:
                carried_eta = periodic_hermite_eval(x, eta_next[m], eta_row_slopes,
                                                    grid.length, feet)
                src_eta_feet = periodic_hermite_eval(x, src_eta[m], src_eta_slopes[m],
                                                     grid.length, feet)
                eta_next[m + 1] = carried_eta + 0.5 * step_dt * (src_eta_feet
                                                                 + src_eta[m + 1])
                eta_row_slopes = _slopes(grid, eta_next[m + 1])

        inc = max(
            besov_norm(u_next[m] - u_curr[m], 1.0 / p, p, 1.0, bank=bank).norm
            for m in range(n_steps + 1)
        )
        if has_eta:
            inc += max(
                besov_norm(eta_next[m] - eta_curr[m], 1.0 / p, p, 1.0, bank=bank).norm
                for m in range(n_steps + 1)
            )
        increments.append(inc)
        u_curr = u_next
        if has_eta:
            eta_curr = eta_next
        if inc < tol:
            converged = True
            break

    final = EulerianField(grid=grid, u=u_curr[-1],
                          eta=None if not has_eta else eta_curr[-1],
                          t=horizon)
    return PicardReport(
        iterations=iterations,
        increments=np.array(increments),
        converged=converged,
        final=final,
        times=times,
    )


def write_picard_csv(report: PicardReport, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "increment"])
        for i, inc in enumerate(report.increments, start=1):
            writer.writerow([i, f"{inc:.17g}"])
