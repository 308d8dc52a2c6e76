"""Linear-time convolution against the half-exponential kernel.

The nonlocal terms of Camassa-Holm type equations are convolutions with
exp(-|x|)/2 and its derivative, evaluated on ordered node sets.  Splitting
the kernel at the diagonal turns each convolution into two first-order
recurrences over the nodes,

    lscan[i] = exp(-(y[i] - y[i-1])) * lscan[i-1] + w[i],
    rscan[i] = exp(-(y[i+1] - y[i])) * rscan[i+1] + w[i],

so the cost is O(N) instead of the O(N^2) double sum.  Only differences of
neighbouring positions are exponentiated, which keeps everything finite on
arbitrarily wide domains.

Two interchangeable backends run the recurrences: a compiled extension and
a pure-Python loop.  They are selected at import time (override with the
CHFLOW_SCAN_BACKEND environment variable) and produce bit-identical output.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import EulerianField, Grid1D

from . import _scan_py

try:
    from . import _scan_ext
except ImportError:
    _scan_ext = None

_BACKENDS = {"pure": _scan_py}
if _scan_ext is not None:
    _BACKENDS["compiled"] = _scan_ext

_requested = os.environ.get("CHFLOW_SCAN_BACKEND")
if _requested is not None:
    if _requested not in _BACKENDS:
        raise ImportError(
            f"CHFLOW_SCAN_BACKEND={_requested!r} is not available; "
            f"choices: {sorted(_BACKENDS)}"
        )
    _ACTIVE = _requested
else:
    _ACTIVE = "compiled" if _scan_ext is not None else "pure"


def scan_backend() -> str:
    """Name of the backend running the scan recurrences."""
    return _ACTIVE


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


@dataclass(frozen=True, eq=False)
class WeightedNodes:
    """Ordered node positions with attached weights (an atomic measure)."""

    y: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=float)
        w = np.ascontiguousarray(self.w, dtype=float)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)
        if y.ndim != 1 or y.shape != w.shape:
            raise ValueError("y and w must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
            raise ValueError("nodes and weights must be finite")
        if y.size > 1 and np.any(np.diff(y) <= 0):
            raise ValueError("node positions must be strictly increasing")


@dataclass(frozen=True, eq=False)
class ScanPair:
    """Directional scans: lscan[i] = sum_{j<=i} exp(-(y_i-y_j)) w_j and mirrored."""

    lscan: np.ndarray
    rscan: np.ndarray


def exp_scans(nodes: WeightedNodes, backend: Optional[str] = None) -> ScanPair:
    """Run both directional recurrences over the nodes in O(N)."""
    module = _BACKENDS[backend] if backend is not None else _BACKENDS[_ACTIVE]
    y, w = nodes.y, nodes.w
    if y.size > 1:
        # decay factors in one temporary: d = exp(-(y[i+1] - y[i]))
        d = y[:-1] - y[1:]
        np.exp(d, out=d)
    else:
        d = np.empty(0)
    lscan = np.empty_like(w)
    rscan = np.empty_like(w)
    module.scan_pair(d, w, lscan, rscan)
    return ScanPair(lscan=lscan, rscan=rscan)


def conv_exp(nodes: WeightedNodes, scans: Optional[ScanPair] = None) -> np.ndarray:
    """Convolution with exp(-|x|)/2 at the nodes of the atomic measure.

    The diagonal term appears in both scans and is subtracted once:
    result[i] = (lscan[i] + rscan[i] - w[i]) / 2 = sum_j exp(-|y_i-y_j|) w_j / 2.
    """
    if scans is None:
        scans = exp_scans(nodes)
    return 0.5 * (scans.lscan + scans.rscan - nodes.w)


def conv_exp_dx(nodes: WeightedNodes, scans: Optional[ScanPair] = None) -> np.ndarray:
    """Signed-kernel convolution sum_j sign(y_i-y_j) exp(-|y_i-y_j|) w_j / 2.

    The diagonal cancels between the scans, which realises sign(0) = 0.
    """
    if scans is None:
        scans = exp_scans(nodes)
    return 0.5 * (scans.lscan - scans.rscan)


def apply_helmholtz_inverse(grid: Grid1D, values: np.ndarray) -> np.ndarray:
    """(1 - d^2/dx^2)^{-1} as the Fourier multiplier 1/(1+k^2)."""
    spec = np.fft.rfft(values)
    spec /= 1.0 + grid.wavenumbers**2
    return np.fft.irfft(spec, n=grid.count)


def apply_helmholtz_inverse_dx(grid: Grid1D, values: np.ndarray) -> np.ndarray:
    """d/dx (1 - d^2/dx^2)^{-1} as the multiplier ik/(1+k^2); Nyquist zeroed."""
    spec = np.fft.rfft(values)
    k = grid.wavenumbers
    spec *= 1j * k / (1.0 + k**2)
    spec[-1] = 0.0
    return np.fft.irfft(spec, n=grid.count)


def helmholtz_inverse(field: EulerianField) -> EulerianField:
    """Field-level Helmholtz inversion of the u component."""
    return EulerianField(
        grid=field.grid,
        u=apply_helmholtz_inverse(field.grid, field.u),
        t=field.t,
    )


def helmholtz_inverse_dx(field: EulerianField) -> EulerianField:
    """Field-level derivative-of-inverse, the multiplier ik/(1+k^2)."""
    return EulerianField(
        grid=field.grid,
        u=apply_helmholtz_inverse_dx(field.grid, field.u),
        t=field.t,
    )
