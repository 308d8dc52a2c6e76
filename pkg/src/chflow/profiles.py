"""Named initial-data profiles shared by the CLI and the test suite."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .fields import EulerianField, Grid1D
from .peakon import PeakonEnsemble, mollify, sample_field


def gaussian_profile(grid: Grid1D, amplitude: float = 0.5, width: float = 1.0,
                     center: float = 0.0) -> EulerianField:
    x = grid.points
    return EulerianField(grid=grid, u=amplitude * np.exp(-((x - center) / width) ** 2))


def bump_profile(grid: Grid1D, amplitude: float = 1.0, width: float = 1.0,
                 center: float = 0.0) -> EulerianField:
    """Compactly supported C-infinity bump exp(1 - 1/(1 - r^2)) on |r| < 1."""
    r = (grid.points - center) / width
    u = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    u[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
    return EulerianField(grid=grid, u=amplitude * u)


def peakon_profile(grid: Grid1D, c: float = 1.0, center: float = 0.0,
                   delta: Optional[float] = None) -> EulerianField:
    field = sample_field(PeakonEnsemble(p=[c], q=[center]), grid)
    return mollify(field, delta) if delta else field


def multipeakon_profile(grid: Grid1D, p, q,
                        delta: Optional[float] = None) -> EulerianField:
    field = sample_field(PeakonEnsemble(p=p, q=q), grid)
    return mollify(field, delta) if delta else field


def sine_packet_profile(grid: Grid1D, amplitude: float = 1.0,
                        carrier: float = 4.0, width: float = 2.0,
                        center: float = 0.0) -> EulerianField:
    x = grid.points - center
    return EulerianField(grid=grid,
                         u=amplitude * np.cos(carrier * x) * np.exp(-((x / width) ** 2)))


PROFILE_BUILDERS = {
    "gaussian": gaussian_profile,
    "bump": bump_profile,
    "peakon": peakon_profile,
    "multipeakon": multipeakon_profile,
    "sine_packet": sine_packet_profile,
    "zero": lambda grid: EulerianField(grid=grid, u=np.zeros(grid.count)),
}


def build_initial(grid: Grid1D, descriptor: dict,
                  with_eta: bool = False) -> EulerianField:
    """Build initial data from a profile descriptor.

    The descriptor carries a 'profile' name plus that profile's keyword
    parameters; for two-component runs, keys prefixed 'eta_' describe a
    Gaussian second component.
    """
    desc = dict(descriptor)
    name = desc.pop("profile", "gaussian")
    if name not in PROFILE_BUILDERS:
        raise KeyError(f"initial.profile: unknown profile {name!r}")
    eta_params = {k[4:]: desc.pop(k) for k in list(desc) if k.startswith("eta_")}
    field = PROFILE_BUILDERS[name](grid, **desc)
    if with_eta:
        eta = gaussian_profile(grid, **eta_params) if eta_params else \
            gaussian_profile(grid, amplitude=0.0)
        return EulerianField(grid=grid, u=field.u, eta=eta.u, t=0.0)
    return field
