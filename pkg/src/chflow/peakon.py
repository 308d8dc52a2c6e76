"""Multipeakon dynamics, the package's exact-solution oracle.

A superposition sum_i p_i exp(-|x - q_i|) solves the Camassa-Holm equation
whenever the amplitudes and positions follow the canonical system

    dp_i/dt = sum_{j != i} p_i p_j sign(q_i - q_j) exp(-|q_i - q_j|),
    dq_i/dt = sum_j p_j exp(-|q_i - q_j|),

with conserved energy H = sum_{i,j} p_i p_j exp(-|q_i - q_j|) / 2.  Both
sums are evaluated in O(M) through the kernel scans.  A spectral Gaussian
mollifier bridges the peaked profiles into the smooth class the flow-map
solver accepts.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import EulerianField, Grid1D
from .kernel import WeightedNodes, exp_scans

COLLISION_GAP = 1e-10


@dataclass(frozen=True, eq=False)
class PeakonEnsemble:
    """Amplitudes p and strictly increasing positions q of M peakons."""

    p: np.ndarray
    q: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        q = np.array(self.q, dtype=float)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if p.ndim != 1 or p.shape != q.shape or p.size < 1:
            raise ValueError("p and q must be 1-D arrays of equal positive length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise ValueError("ensemble data must be finite")
        if q.size > 1 and np.any(np.diff(q) <= 0):
            raise ValueError("positions must be strictly increasing")
        p.setflags(write=False)
        q.setflags(write=False)

    @property
    def size(self) -> int:
        return self.p.size


def multipeakon_rhs(ens: PeakonEnsemble):
    """Canonical rates (dp, dq), evaluated with the O(M) scans."""
    if ens.size > 1 and np.min(np.diff(ens.q)) < COLLISION_GAP:
        raise ValueError("coincident peakon positions: the vector field is singular")
    scans = exp_scans(WeightedNodes(y=ens.q, w=ens.p))
    dq = scans.lscan + scans.rscan - ens.p
    dp = ens.p * (scans.lscan - scans.rscan)
    return dp, dq


def hamiltonian(ens: PeakonEnsemble) -> float:
    """H = sum_{i,j} p_i p_j exp(-|q_i-q_j|) / 2, diagonal included."""
    scans = exp_scans(WeightedNodes(y=ens.q, w=ens.p))
    return float(0.5 * np.sum(ens.p * (scans.lscan + scans.rscan - ens.p)))


def sample_field(ens: PeakonEnsemble, grid: Grid1D) -> EulerianField:
    """u(x) = sum_i p_i exp(-|x - q_i|) on the grid points."""
    x = grid.points
    u = np.exp(-np.abs(x[:, None] - ens.q[None, :])) @ ens.p
    return EulerianField(grid=grid, u=u, t=ens.t)


def mollify(field: EulerianField, delta: float) -> EulerianField:
    """Gaussian frequency cutoff exp(-delta^2 k^2)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    multiplier = np.exp(-(delta * field.grid.wavenumbers) ** 2)
    u = np.fft.irfft(multiplier * np.fft.rfft(field.u), n=field.grid.count)
    eta = None
    if field.has_eta:
        eta = np.fft.irfft(multiplier * np.fft.rfft(field.eta), n=field.grid.count)
    return EulerianField(grid=field.grid, u=u, eta=eta, t=field.t)


@dataclass(frozen=True)
class CollisionInfo:
    time: float
    gap: float
    pair: int  # index i of the closing pair (q_i, q_{i+1})


@dataclass
class PeakonTrajectory:
    times: np.ndarray
    p: np.ndarray  # shape (steps+1, M)
    q: np.ndarray
    H: np.ndarray
    collision: Optional[CollisionInfo] = None

    @property
    def final(self) -> PeakonEnsemble:
        return PeakonEnsemble(p=self.p[-1], q=self.q[-1], t=float(self.times[-1]))


def _rk4_ensemble(ens: PeakonEnsemble, dt: float) -> PeakonEnsemble:
    p0, q0 = ens.p, ens.q
    dp1, dq1 = multipeakon_rhs(ens)
    e2 = PeakonEnsemble(p=p0 + 0.5 * dt * dp1, q=q0 + 0.5 * dt * dq1, t=ens.t)
    dp2, dq2 = multipeakon_rhs(e2)
    e3 = PeakonEnsemble(p=p0 + 0.5 * dt * dp2, q=q0 + 0.5 * dt * dq2, t=ens.t)
    dp3, dq3 = multipeakon_rhs(e3)
    e4 = PeakonEnsemble(p=p0 + dt * dp3, q=q0 + dt * dq3, t=ens.t)
    dp4, dq4 = multipeakon_rhs(e4)
    return PeakonEnsemble(
        p=p0 + dt / 6.0 * (dp1 + 2 * dp2 + 2 * dp3 + dp4),
        q=q0 + dt / 6.0 * (dq1 + 2 * dq2 + 2 * dq3 + dq4),
        t=ens.t + dt,
    )


def integrate_multipeakon(ens: PeakonEnsemble, dt: float, horizon: float,
                          collision_gap: float = COLLISION_GAP) -> PeakonTrajectory:
    """RK4 march of the canonical system; a closing pair terminates the run."""
    if dt <= 0 or horizon <= 0:
        raise ValueError("dt and horizon must be positive")
    n_steps = max(1, int(round(horizon / dt)))
    dt_last = horizon - (n_steps - 1) * dt
    times = [ens.t]
    ps = [ens.p]
    qs = [ens.q]
    hs = [hamiltonian(ens)]
    collision = None
    current = ens
    for step in range(1, n_steps + 1):
        try:
            current = _rk4_ensemble(current, dt if step < n_steps else dt_last)
        except ValueError:
            gap = float(np.min(np.diff(current.q))) if current.size > 1 else np.inf
            collision = CollisionInfo(time=current.t, gap=gap,
                                      pair=int(np.argmin(np.diff(current.q))))
            break
        if current.size > 1:
            gaps = np.diff(current.q)
            if np.min(gaps) < collision_gap:
                collision = CollisionInfo(time=current.t, gap=float(np.min(gaps)),
                                          pair=int(np.argmin(gaps)))
                break
        times.append(current.t)
        ps.append(current.p)
        qs.append(current.q)
        hs.append(hamiltonian(current))
    return PeakonTrajectory(
        times=np.array(times),
        p=np.array(ps),
        q=np.array(qs),
        H=np.array(hs),
        collision=collision,
    )


def write_ensemble_csv(ens: PeakonEnsemble, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "q"])
        for p, q in zip(ens.p, ens.q):
            writer.writerow([f"{p:.17g}", f"{q:.17g}"])


def read_ensemble_csv(path, t: float = 0.0) -> PeakonEnsemble:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return PeakonEnsemble(p=np.atleast_1d(data["p"]),
                          q=np.atleast_1d(data["q"]), t=t)


def write_peakon_jsonl(traj: PeakonTrajectory, path) -> None:
    with open(path, "w") as fh:
        for i, t in enumerate(traj.times):
            fh.write(json.dumps({
                "t": float(t),
                "p": [float(v) for v in traj.p[i]],
                "q": [float(v) for v in traj.q[i]],
                "H": float(traj.H[i]),
            }) + "\n")
        if traj.collision is not None:
            fh.write(json.dumps({
                "collision": True,
                "t": traj.collision.time,
                "gap": traj.collision.gap,
                "pair": traj.collision.pair,
            }) + "\n")
