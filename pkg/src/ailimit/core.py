"""The 3D quadratic diffeomorphism and its difference-equation forms.

The map acts on (x, y, z) as

    (x, y, z) -> (delta*z + alpha + tau*x - sigma*y + Q(x, y), x, y),
    Q(x, y) = a*x^2 + b*x*y + c*y^2,

with Jacobian determinant delta.  Because y and z are delayed copies of x,
orbits are equivalent to a scalar third-order recurrence, and after the
rescaling xi = eps*x with alpha = -eps^-2, sigma = r/eps the recurrence
becomes a perturbation of the quadratic curve Q(xi_t, xi_{t-1}) =
r*xi_{t-1} + 1, the anti-integrable limit curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

from .errors import NumericalFailure

__all__ = [
    "MapParams",
    "RescaledParams",
    "State3",
    "ConicClass",
    "map_forward",
    "map_inverse",
    "difference_step",
    "rescaled_residual",
    "classify_conic",
    "fixed_points_ai",
    "conic_center",
    "DEGENERACY_TOL",
]

# Absolute tolerance for detecting measure-zero conic degeneracies.
DEGENERACY_TOL = 1e-12


class State3(NamedTuple):
    """Phase-space point (x, y, z); y and z lag x by one and two steps."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class MapParams:
    """The seven map parameters.

    The affine normalization a + b + c = 1, tau = 0 is available through
    :meth:`normalized`; the reduced form additionally sets b = 0 so that
    a = 1 - c, which the region and AI-state machinery requires.
    """

    alpha: float
    sigma: float
    tau: float = 0.0
    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    delta: float = 1.0

    @classmethod
    def normalized(cls, alpha, sigma, a, c, delta):
        """Params with tau = 0 and b chosen so that a + b + c = 1."""
        return cls(alpha=alpha, sigma=sigma, tau=0.0, a=a, b=1.0 - a - c,
                   c=c, delta=delta)

    @classmethod
    def reduced(cls, alpha, sigma, c, delta):
        """Reduced-mode params: b = 0, a = 1 - c, tau = 0."""
        return cls(alpha=alpha, sigma=sigma, tau=0.0, a=1.0 - c, b=0.0,
                   c=c, delta=delta)

    @classmethod
    def structural(cls, a, c, delta, b=0.0):
        """Carrier for the structural constants only; alpha and sigma are
        filled in per parameter-scan cell."""
        return cls(alpha=0.0, sigma=0.0, tau=0.0, a=a, b=b, c=c, delta=delta)

    @property
    def is_reduced(self) -> bool:
        return self.b == 0.0 and self.tau == 0.0 and self.a == 1.0 - self.c

    def with_alpha_sigma(self, alpha, sigma) -> "MapParams":
        return replace(self, alpha=alpha, sigma=sigma)


@dataclass(frozen=True)
class RescaledParams:
    """Rescaled parameter pair (eps, r) with alpha = -eps^-2, sigma = r/eps."""

    epsilon: float
    r: float

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be nonnegative")

    def alpha_sigma(self) -> tuple[float, float]:
        if self.epsilon == 0.0:
            raise ValueError("alpha and sigma are unbounded at epsilon = 0")
        inv = 1.0 / self.epsilon
        return -inv * inv, self.r * inv

    @classmethod
    def from_alpha_sigma(cls, alpha, sigma) -> "RescaledParams":
        if alpha >= 0.0:
            raise ValueError("rescaling requires alpha < 0")
        eps = 1.0 / math.sqrt(-alpha)
        return cls(epsilon=eps, r=sigma * eps)


class ConicClass(Enum):
    """Classification of the AI-limit curve in reduced mode."""

    ELLIPSE = "Ellipse"
    PARABOLA = "Parabola"
    HYPERBOLA = "Hyperbola"
    DEGENERATE_VERTICAL_LINES = "DegenerateVerticalLines"
    DEGENERATE_INTERSECTING_LINES = "DegenerateIntersectingLines"
    DEGENERATE_HORIZONTAL_LINES = "DegenerateHorizontalLines"
    DEGENERATE_POINT = "DegeneratePoint"  # unreachable in reduced mode


def _quadratic(p: MapParams, x, y):
    return p.a * x * x + p.b * x * y + p.c * y * y


def map_forward(s: State3, p: MapParams) -> State3:
    """One forward step of the diffeomorphism."""
    x, y, z = s
    xn = p.delta * z + p.alpha + p.tau * x - p.sigma * y + _quadratic(p, x, y)
    return State3(xn, x, y)


def map_inverse(s: State3, p: MapParams) -> State3:
    """One backward step; requires delta != 0.

    Solving the forward formula for z gives
    z = (x' - alpha - tau*y' + sigma*z' - Q(y', z')) / delta.
    """
    if p.delta == 0.0:
        raise ValueError("map is not invertible: delta = 0")
    xp, yp, zp = s
    z = (xp - p.alpha - p.tau * yp + p.sigma * zp - _quadratic(p, yp, zp)) / p.delta
    return State3(yp, zp, z)


def difference_step(x_t: float, x_tm1: float, x_tm2: float, p: MapParams) -> float:
    """Next x of the scalar third-order recurrence (needs tau = 0).

    Shares its arithmetic with :func:`map_forward`, so orbits of the two
    forms agree bitwise.
    """
    if p.tau != 0.0:
        raise ValueError("difference form requires the tau = 0 convention")
    return (p.delta * x_tm2 + p.alpha + p.tau * x_t - p.sigma * x_tm1
            + _quadratic(p, x_t, x_tm1))


def rescaled_residual(xi_tp1: float, xi_t: float, xi_tm1: float, xi_tm2: float,
                      q: RescaledParams, a: float, b: float, c: float,
                      delta: float) -> float:
    """Residual of the rescaled difference equation at one time step:

    Q(xi_t, xi_{t-1}) - r*xi_{t-1} - 1 - eps*(xi_{t+1} - delta*xi_{t-2}).
    """
    quad = a * xi_t * xi_t + b * xi_t * xi_tm1 + c * xi_tm1 * xi_tm1
    return quad - q.r * xi_tm1 - 1.0 - q.epsilon * (xi_tp1 - delta * xi_tm2)


def classify_conic(r: float, c: float, tol: float = DEGENERACY_TOL) -> ConicClass:
    """Classify the reduced AI-limit curve a*xi^2 + c*eta^2 = r*eta + 1.

    With a = 1 - c the discriminant is 4c(c - 1): an ellipse for 0 < c < 1,
    a parabola along c = 0, a hyperbola for c < 0 or c > 1.  Degeneracies:
    vertical line pair at c = 1, intersecting lines on c = -r^2/4, and a
    horizontal line pair at r = c = 0.
    """
    if abs(c - 1.0) <= tol:
        return ConicClass.DEGENERATE_VERTICAL_LINES
    if abs(c) <= tol:
        if abs(r) <= tol:
            return ConicClass.DEGENERATE_HORIZONTAL_LINES
        return ConicClass.PARABOLA
    if c < 0.0 and abs(c + r * r / 4.0) <= tol:
        return ConicClass.DEGENERATE_INTERSECTING_LINES
    if 0.0 < c < 1.0:
        return ConicClass.ELLIPSE
    return ConicClass.HYPERBOLA


def fixed_points_ai(r: float) -> tuple[float, float]:
    """Fixed points of the AI branch maps: (r -+ sqrt(r^2 + 4)) / 2.

    Returns (xi_minus, xi_plus) with xi_minus < 0 < xi_plus; they solve
    xi^2 = r*xi + 1 and exist for every r.
    """
    root = math.sqrt(r * r + 4.0)
    return 0.5 * (r - root), 0.5 * (r + root)


def conic_center(r: float, c: float) -> float:
    """Horizontal center r/(2c) of the AI curve; undefined at c = 0."""
    if c == 0.0:
        raise ValueError("conic center is undefined for c = 0")
    return r / (2.0 * c)


def fixed_point_x_minus(alpha: float, sigma: float, delta: float) -> float:
    """Lower fixed point of the unrescaled recurrence:

    x_- = (1 + sigma - delta - sqrt((1 + sigma - delta)^2 - 4*alpha)) / 2.
    """
    s = 1.0 + sigma - delta
    disc = s * s - 4.0 * alpha
    if disc < 0.0:
        raise NumericalFailure("no real fixed point: discriminant < 0")
    return 0.5 * (s - math.sqrt(disc))
