"""The three concrete systems as transport-plus-nonlocal-source pairs.

Each family fits the shape  u_t + A(u) u_x = F(u)  with a polynomial
transport speed A and a nonlocal source built from the half-exponential
kernel:

  camassa-holm:  A(u) = u,
                 F(u) = -dx (1-dxx)^{-1} (u^2 + u_x^2/2)
  novikov:       A(u) = u^2,
                 F(u) = -dx (1-dxx)^{-1} (u^3 + 3 u u_x^2 / 2)
                        - (1-dxx)^{-1} (u_x^3 / 2)
  two-component: A(u) = u,
                 F(u, eta) = -dx (1-dxx)^{-1} (u^2 + u_x^2/2 + eta^2/2 + eta),
                 eta_t + u eta_x = -u_x (1 + eta)

In flow-map variables the sources become kernel sums over the moving nodes
with weights obtained by the change of variables dx = y_xi dxi; both forms
are provided and are cross-validated against each other in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .exceptions import BreakdownError
from .fields import EulerianField, LagrangianState, spectral_derivative
from .kernel import (
    WeightedNodes,
    apply_helmholtz_inverse,
    apply_helmholtz_inverse_dx,
    conv_exp,
    conv_exp_dx,
    exp_scans,
)

FAMILIES = ("ch", "novikov", "2ch")


@dataclass(frozen=True)
class EquationSpec:
    """Family tag plus the structural constants attached to it.

    degree: exponent of the transport speed A(u) = u**degree.
    k: nonlinearity degree entering the smallness-time denominator
       (quadratic families have k = 1, the cubic one k = 2).
    h_coeffs: (a, b) of the affine closure h(eta) = a*eta + b for the
       two-component system, None otherwise.
    """

    family: str
    degree: int
    k: int
    h_coeffs: Optional[Tuple[float, float]] = None

    @classmethod
    def camassa_holm(cls) -> "EquationSpec":
        return cls(family="ch", degree=1, k=1)

    @classmethod
    def novikov(cls) -> "EquationSpec":
        return cls(family="novikov", degree=2, k=2)

    @classmethod
    def two_component(cls) -> "EquationSpec":
        return cls(family="2ch", degree=1, k=1, h_coeffs=(1.0, 1.0))

    @classmethod
    def from_tag(cls, tag: str) -> "EquationSpec":
        try:
            return {
                "ch": cls.camassa_holm,
                "novikov": cls.novikov,
                "2ch": cls.two_component,
            }[tag]()
        except KeyError:
            raise ValueError(f"unknown equation family {tag!r}; "
                             f"choices: {FAMILIES}") from None

    @property
    def has_eta(self) -> bool:
        return self.family == "2ch"

    def transport(self, u: np.ndarray) -> np.ndarray:
        """A(u)."""
        return u if self.degree == 1 else u**self.degree

    def check_field(self, field: EulerianField) -> None:
        if field.has_eta != self.has_eta:
            raise ValueError(
                f"field shape does not match family {self.family!r} "
                f"(eta {'required' if self.has_eta else 'not allowed'})"
            )

    def check_state(self, state: LagrangianState) -> None:
        if state.has_v != self.has_eta:
            raise ValueError(
                f"state shape does not match family {self.family!r} "
                f"(V {'required' if self.has_eta else 'not allowed'})"
            )


class FieldRates(NamedTuple):
    du: np.ndarray
    deta: Optional[np.ndarray]


class StateRates(NamedTuple):
    dy: np.ndarray
    dy_xi: np.ndarray
    dU: np.ndarray
    dU_xi: np.ndarray
    dV: Optional[np.ndarray]


def eulerian_source(spec: EquationSpec, field: EulerianField) -> FieldRates:
    """The source pair (F(u), -A'(u) u_x h(eta)) without the transport part."""
    spec.check_field(field)
    grid, u = field.grid, field.u
    ux = field.u_x()
    if spec.family == "ch":
        F = -apply_helmholtz_inverse_dx(grid, u**2 + 0.5 * ux**2)
        return FieldRates(du=F, deta=None)
    if spec.family == "novikov":
        F = -apply_helmholtz_inverse_dx(grid, u**3 + 1.5 * u * ux**2)
        F -= apply_helmholtz_inverse(grid, 0.5 * ux**3)
        return FieldRates(du=F, deta=None)
    eta = field.eta
    a, b = spec.h_coeffs
    F = -apply_helmholtz_inverse_dx(grid, u**2 + 0.5 * ux**2 + 0.5 * eta**2 + eta)
    return FieldRates(du=F, deta=-ux * (a * eta + b))


def rhs_eulerian(spec: EquationSpec, field: EulerianField) -> FieldRates:
    """Total time derivative -A(u) u_x + F(u) (and the eta equation)."""
    spec.check_field(field)
    src = eulerian_source(spec, field)
    ux = field.u_x()
    du = -spec.transport(field.u) * ux + src.du
    deta = None
    if spec.has_eta:
        eta_x = spectral_derivative(field.grid, field.eta)
        deta = -spec.transport(field.u) * eta_x + src.deta
    return FieldRates(du=du, deta=deta)


def rhs_lagrangian(spec: EquationSpec, state: LagrangianState,
                   theta_floor: float = 1e-10) -> StateRates:
    """Flow-map rates: dy, dy_xi, dU, dU_xi (and dV for the two-component system).

    The nonlocal terms are kernel sums over the nodes y with trapezoid
    weights; the local terms come out of the identity
    -(1-dxx)^{-1} dxx = Id - (1-dxx)^{-1} applied to the xi-derivative.
    """
    spec.check_state(state)
    yxi = state.y_xi
    m = float(np.min(yxi))
    if m < theta_floor:
        raise BreakdownError(
            "Jacobian fell below the evaluation floor",
            time=state.t,
            xi_star=float(state.xi[int(np.argmin(yxi))]),
            min_y_xi=m,
        )
    U, Uxi = state.U, state.U_xi
    dxi = state.spacing

    if spec.family == "ch":
        g = U**2 * yxi + 0.5 * Uxi**2 / yxi
        nodes = WeightedNodes(y=state.y, w=g * dxi)
        scans = exp_scans(nodes)
        return StateRates(
            dy=U,
            dy_xi=Uxi,
            dU=conv_exp_dx(nodes, scans),
            dU_xi=g - yxi * conv_exp(nodes, scans),
            dV=None,
        )

    if spec.family == "novikov":
        ga = U**3 * yxi + 1.5 * U * Uxi**2 / yxi
        gb = 0.5 * Uxi**3 / yxi**2
        nodes_a = WeightedNodes(y=state.y, w=ga * dxi)
        nodes_b = WeightedNodes(y=state.y, w=gb * dxi)
        scans_a = exp_scans(nodes_a)
        scans_b = exp_scans(nodes_b)
        return StateRates(
            dy=U**2,
            dy_xi=2.0 * U * Uxi,
            dU=conv_exp_dx(nodes_a, scans_a) - conv_exp(nodes_b, scans_b),
            dU_xi=(ga - yxi * conv_exp(nodes_a, scans_a)
                   + yxi * conv_exp_dx(nodes_b, scans_b)),
            dV=None,
        )

    V = state.V
    a, b = spec.h_coeffs
    g = U**2 * yxi + 0.5 * Uxi**2 / yxi + (0.5 * V**2 + V) * yxi
    nodes = WeightedNodes(y=state.y, w=g * dxi)
    scans = exp_scans(nodes)
    return StateRates(
        dy=U,
        dy_xi=Uxi,
        dU=conv_exp_dx(nodes, scans),
        dU_xi=g - yxi * conv_exp(nodes, scans),
        dV=-(Uxi / yxi) * (a * V + b),
    )
