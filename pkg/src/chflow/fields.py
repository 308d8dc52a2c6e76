"""Uniform periodic grids, sampled fields, flow-map states, and norms.

Everything lives on a torus of length L (default 40 in the rest of the
package) large enough that the exponentially decayed data of interest is
below round-off at the seam; spectral operations are then exact and the
line-kernel convolutions and the periodic Fourier multipliers agree.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Union

import numpy as np

from ._interp import periodic_hermite_eval
from .exceptions import BreakdownError, NonFiniteError


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid of N points on [-L/2, L/2)."""

    length: float
    count: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("grid length must be positive")
        n = self.count
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError("grid count must be a power of two >= 8")

    @property
    def spacing(self) -> float:
        return self.length / self.count

    @cached_property
    def points(self) -> np.ndarray:
        return _readonly(-0.5 * self.length + self.spacing * np.arange(self.count))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Nonnegative wavenumbers matching numpy's rfft layout."""
        return _readonly(2.0 * np.pi * np.fft.rfftfreq(self.count, d=self.spacing))

    @property
    def nyquist(self) -> float:
        return np.pi / self.spacing


def spectral_derivative(grid: Grid1D, values: np.ndarray) -> np.ndarray:
    """d/dx by Fourier multiplier ik; the Nyquist mode is zeroed."""
    spec = np.fft.rfft(values)
    spec *= 1j * grid.wavenumbers
    spec[-1] = 0.0
    return np.fft.irfft(spec, n=grid.count)


def dealias_projection(grid: Grid1D, values: np.ndarray) -> np.ndarray:
    """Zero all modes above two thirds of the Nyquist wavenumber."""
    spec = np.fft.rfft(values)
    spec[grid.wavenumbers > (2.0 / 3.0) * grid.nyquist] = 0.0
    return np.fft.irfft(spec, n=grid.count)


@dataclass(frozen=True, eq=False)
class EulerianField:
    """Sampled solution u (and optional second component eta) on a grid."""

    grid: Grid1D
    u: np.ndarray
    eta: Optional[np.ndarray] = None
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "u", _readonly(self.u))
        if self.u.shape != (self.grid.count,):
            raise ValueError("u must have one value per grid point")
        if not np.all(np.isfinite(self.u)):
            raise NonFiniteError("non-finite values in u")
        if self.eta is not None:
            object.__setattr__(self, "eta", _readonly(self.eta))
            if self.eta.shape != self.u.shape:
                raise ValueError("eta must match u in shape")
            if not np.all(np.isfinite(self.eta)):
                raise NonFiniteError("non-finite values in eta")
        if self.t < 0:
            raise ValueError("time must be nonnegative")

    @property
    def has_eta(self) -> bool:
        return self.eta is not None

    def u_x(self) -> np.ndarray:
        return spectral_derivative(self.grid, self.u)

    def seam_amplitude(self) -> float:
        """Largest |u| at the two cells next to the torus seam.

        Monitors the domain-truncation convention: decayed data should keep
        this below round-off relative to max |u|.
        """
        return float(max(abs(self.u[0]), abs(self.u[-1])))


@dataclass(frozen=True, eq=False)
class LagrangianState:
    """Flow map y(xi), pulled-back solution U = u(y), and their xi-derivatives."""

    xi: np.ndarray
    y: np.ndarray
    U: np.ndarray
    y_xi: np.ndarray
    U_xi: np.ndarray
    V: Optional[np.ndarray] = None
    t: float = 0.0

    def __post_init__(self):
        for name in ("xi", "y", "U", "y_xi", "U_xi"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        if self.V is not None:
            object.__setattr__(self, "V", _readonly(self.V))
        n = self.xi.shape[0]
        arrays = [self.y, self.U, self.y_xi, self.U_xi]
        if self.V is not None:
            arrays.append(self.V)
        for a in arrays:
            if a.shape != (n,):
                raise ValueError("state arrays must share one length")
            if not np.all(np.isfinite(a)):
                raise NonFiniteError("non-finite values in state")
        if np.any(np.diff(self.xi) <= 0):
            raise ValueError("labels xi must be strictly increasing")
        if np.any(np.diff(self.y) <= 0):
            raise BreakdownError(
                "flow map is not strictly increasing",
                time=self.t,
                xi_star=float(self.xi[int(np.argmin(np.diff(self.y)))]),
                min_y_xi=float(np.min(self.y_xi)),
            )
        if np.any(self.y_xi <= 0):
            raise BreakdownError(
                "Jacobian y_xi lost positivity",
                time=self.t,
                xi_star=float(self.xi[int(np.argmin(self.y_xi))]),
                min_y_xi=float(np.min(self.y_xi)),
            )

    @property
    def count(self) -> int:
        return self.xi.shape[0]

    @property
    def spacing(self) -> float:
        return float(self.xi[1] - self.xi[0])

    @property
    def period(self) -> float:
        return self.count * self.spacing

    @property
    def has_v(self) -> bool:
        return self.V is not None

    def min_y_xi(self) -> float:
        return float(np.min(self.y_xi))


@dataclass(frozen=True)
class NormReport:
    """L^p, W^{1,p} and W^{1,inf} norms of one function."""

    lp: float
    w1p: float
    w1inf: float
    p: float


def trapezoid_lp(values: np.ndarray, spacing: float, p: float) -> float:
    """L^p norm by the periodic trapezoid rule (= spacing * sum)."""
    return float((spacing * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def sample_function(grid: Grid1D, f: Callable[[np.ndarray], np.ndarray]) -> EulerianField:
    """Sample a scalar function on the grid points at t = 0."""
    x = grid.points
    try:
        values = np.asarray(f(x), dtype=float)
        if values.shape != x.shape:
            raise TypeError
    except Exception:
        values = np.array([float(f(xi)) for xi in x])
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteError(f"f is not finite at sample index {i} (x = {x[i]})")
    return EulerianField(grid=grid, u=values, t=0.0)


def norm_report(values: np.ndarray, deriv: np.ndarray, spacing: float,
                p: float) -> NormReport:
    """Norm triple of a sampled function given its sampled derivative."""
    if not 1 <= p < np.inf:
        raise ValueError("p must satisfy 1 <= p < inf")
    lp = trapezoid_lp(values, spacing, p)
    dlp = trapezoid_lp(deriv, spacing, p)
    w1p = float((lp**p + dlp**p) ** (1.0 / p))
    w1inf = float(max(np.max(np.abs(values)), np.max(np.abs(deriv))))
    return NormReport(lp=lp, w1p=w1p, w1inf=w1inf, p=p)


def norms(obj: Union[EulerianField, LagrangianState], p: float) -> NormReport:
    """Norms of u (Eulerian, spectral derivative) or U (Lagrangian, stored U_xi)."""
    if isinstance(obj, EulerianField):
        return norm_report(obj.u, obj.u_x(), obj.grid.spacing, p)
    if isinstance(obj, LagrangianState):
        return norm_report(obj.U, obj.U_xi, obj.spacing, p)
    raise TypeError("expected an EulerianField or a LagrangianState")


def intersection_norm(report: NormReport) -> float:
    """The W^{1,inf} int W^{1,p} norm, taken as the max of the two."""
    return max(report.w1p, report.w1inf)


def to_lagrangian(field: EulerianField) -> LagrangianState:
    """Initial flow-map state: labels are the grid points, y = xi, y_xi = 1."""
    if field.t != 0.0:
        raise ValueError("Lagrangian initialisation requires a field at t = 0")
    xi = field.grid.points
    return LagrangianState(
        xi=xi,
        y=xi,
        U=field.u,
        y_xi=np.ones_like(xi),
        U_xi=spectral_derivative(field.grid, field.u),
        V=field.eta,
        t=0.0,
    )


def push_forward(state: LagrangianState, grid: Grid1D) -> EulerianField:
    """Resample U (and V) back to a uniform grid through the inverse flow map.

    Uses shape-safeguarded cubic Hermite interpolation of (y_i, U_i) with the
    exact node slopes U_xi/y_xi; the flow map is extended periodically
    (y(xi + L) = y(xi) + L) so targets may wrap around the torus.
    """
    if np.any(np.diff(state.y) <= 0):
        raise BreakdownError("flow map is not invertible", time=state.t)
    period = state.period
    if abs(period - grid.length) > 1e-9 * grid.length:
        raise ValueError("target grid period differs from the state period")
    x = grid.points
    u = periodic_hermite_eval(state.y, state.U, state.U_xi / state.y_xi,
                              period, x)
    eta = None
    if state.has_v:
        # dV/dy = V_xi / y_xi with V_xi computed spectrally on the label grid
        xi_grid = Grid1D(length=period, count=state.count)
        v_xi = spectral_derivative(xi_grid, state.V)
        eta = periodic_hermite_eval(state.y, state.V, v_xi / state.y_xi,
                                    period, x)
    return EulerianField(grid=grid, u=u, eta=eta, t=state.t)


def h1_energy(field: EulerianField) -> float:
    """The integral of u^2 + u_x^2 over the torus."""
    h = field.grid.spacing
    ux = field.u_x()
    return float(h * np.sum(field.u**2 + ux**2))


def write_field_csv(field: EulerianField, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if field.has_eta:
            writer.writerow(["x", "u", "eta"])
            for x, u, e in zip(field.grid.points, field.u, field.eta):
                writer.writerow([f"{x:.17g}", f"{u:.17g}", f"{e:.17g}"])
        else:
            writer.writerow(["x", "u"])
            for x, u in zip(field.grid.points, field.u):
                writer.writerow([f"{x:.17g}", f"{u:.17g}"])


def read_field_csv(path, t: float = 0.0) -> EulerianField:
    data = np.genfromtxt(path, delimiter=",", names=True)
    x = np.atleast_1d(data["x"])
    n = x.size
    grid = Grid1D(length=float(n * (x[1] - x[0])), count=n)
    eta = np.atleast_1d(data["eta"]) if "eta" in (data.dtype.names or ()) else None
    return EulerianField(grid=grid, u=np.atleast_1d(data["u"]), eta=eta, t=t)


def write_state_csv(state: LagrangianState, path) -> None:
    cols = ["xi", "y", "U", "y_xi", "U_xi"]
    arrays = [state.xi, state.y, state.U, state.y_xi, state.U_xi]
    if state.has_v:
        cols.append("V")
        arrays.append(state.V)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in zip(*arrays):
            writer.writerow([f"{v:.17g}" for v in row])


def read_state_csv(path, t: float = 0.0) -> LagrangianState:
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names or ()
    v = np.atleast_1d(data["V"]) if "V" in names else None
    return LagrangianState(
        xi=np.atleast_1d(data["xi"]),
        y=np.atleast_1d(data["y"]),
        U=np.atleast_1d(data["U"]),
        y_xi=np.atleast_1d(data["y_xi"]),
        U_xi=np.atleast_1d(data["U_xi"]),
        V=v,
        t=t,
    )
