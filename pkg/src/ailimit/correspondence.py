"""The anti-integrable correspondence: branch maps and AI states.

At the limit, consecutive orbit values must lie on the quadratic curve

    a*xi_t^2 + c*xi_{t-1}^2 = r*xi_{t-1} + 1,     a = 1 - c,

a non-deterministic relation.  Solving for xi_t gives the forward branch
pair f_s, solving for xi_{t-1} gives the backward pair g_s, s in {-, +}.
Iterating a branch pair through a periodic symbol word, inside a trapping
interval B = [-beta, beta] on which the maps contract, converges to the
unique AI state coded by that word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import (BranchUndefined, ConvergenceFailure, IntervalUndefined,
                     NumericalFailure)
from .symbols import SymbolSequence

__all__ = [
    "Direction",
    "IntervalB",
    "AIState",
    "ai_forward",
    "ai_backward",
    "ai_forward_derivative",
    "ai_backward_derivative",
    "xi_max",
    "beta_for",
    "verify_maps_into",
    "ai_state_from_symbols",
]

# Slack for interval-containment comparisons: the extreme fixed point sits
# exactly on the boundary of B, so exact <= tests fail by round-off.
_CONTAIN_TOL = 1e-12


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class IntervalB:
    """Symmetric trapping interval [-beta, beta]."""

    beta: float

    def __post_init__(self):
        if not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ValueError("beta must be finite and positive")


def ai_forward(xi: float, s: int, r: float, c: float) -> float:
    """Forward branch map f_s(xi) = s*sqrt((-c*xi^2 + r*xi + 1)/a)."""
    a = 1.0 - c
    if a == 0.0:
        raise ValueError("forward branch maps are undefined for c = 1 (a = 0)")
    rad = (-c * xi * xi + r * xi + 1.0) / a
    if rad < 0.0:
        raise BranchUndefined(f"negative radicand {rad:g} in forward branch")
    return s * math.sqrt(rad)


def ai_forward_derivative(xi: float, s: int, r: float, c: float) -> float:
    """Slope of f_s: s*(r - 2c*xi) / (2*sqrt(a*(-c*xi^2 + r*xi + 1)))."""
    a = 1.0 - c
    arho = a * (-c * xi * xi + r * xi + 1.0)
    if arho <= 0.0:
        raise BranchUndefined("forward branch slope diverges: radicand <= 0")
    return s * (r - 2.0 * c * xi) / (2.0 * math.sqrt(arho))


def ai_backward(xi: float, s: int, r: float, c: float) -> float:
    """Backward branch map g_s(xi) = (r + s*sqrt(r^2 + 4c - 4ac*xi^2))/(2c)."""
    if c == 0.0:
        raise ValueError("backward map has no branching for c = 0")
    a = 1.0 - c
    rad = r * r + 4.0 * c - 4.0 * a * c * xi * xi
    if rad < 0.0:
        raise BranchUndefined(f"negative radicand {rad:g} in backward branch")
    return (r + s * math.sqrt(rad)) / (2.0 * c)


def ai_backward_derivative(xi: float, s: int, r: float, c: float) -> float:
    """Slope of g_s, from implicit differentiation: -2*a*s*xi / sqrt(rad)."""
    if c == 0.0:
        raise ValueError("backward map has no branching for c = 0")
    a = 1.0 - c
    rad = r * r + 4.0 * c - 4.0 * a * c * xi * xi
    if rad <= 0.0:
        raise BranchUndefined("backward branch slope diverges: radicand <= 0")
    return -2.0 * a * s * xi / math.sqrt(rad)


def xi_max(r: float) -> float:
    """Largest absolute branch fixed point, (|r| + sqrt(r^2 + 4))/2."""
    return 0.5 * (abs(r) + math.sqrt(r * r + 4.0))


def beta_for(r: float, c: float, direction: Direction) -> IntervalB:
    """Trapping-interval half width for the case at (r, c).

    Forward: beta = xi_max for the parabolic, hyperbolic and outlying-ellipse
    cases; for an ellipse whose center lies inside [-xi_max, xi_max] beta is
    the vertical half-extent sqrt((r^2 + 4c)/(4ac)).  Backward: the ellipse
    band uses the horizontal half-extent (|r| + sqrt(r^2 + 4c))/(2c), and
    c >= 1 uses xi_max.  Other cases define no interval.
    """
    if direction is Direction.FORWARD:
        if c >= 1.0:
            raise IntervalUndefined("no forward trapping interval for c >= 1")
        if 0.0 < c < 1.0 and abs(r / (2.0 * c)) < xi_max(r):
            a = 1.0 - c
            return IntervalB(math.sqrt((r * r + 4.0 * c) / (4.0 * a * c)))
        return IntervalB(xi_max(r))
    if c >= 1.0:
        return IntervalB(xi_max(r))
    if 0.0 < c < 1.0:
        return IntervalB((abs(r) + math.sqrt(r * r + 4.0 * c)) / (2.0 * c))
    raise IntervalUndefined("no backward trapping interval for c <= 0")


def _quad_range(A: float, B: float, C: float, beta: float) -> tuple[float, float]:
    """Exact range of A*x^2 + B*x + C over [-beta, beta]."""
    v1 = A * beta * beta + B * beta + C
    v2 = A * beta * beta - B * beta + C
    lo, hi = (v1, v2) if v1 <= v2 else (v2, v1)
    if A != 0.0:
        xv = -B / (2.0 * A)
        if -beta <= xv <= beta:
            vv = C - B * B / (4.0 * A)
            lo = min(lo, vv)
            hi = max(hi, vv)
    return lo, hi


def verify_maps_into(r: float, c: float, B: IntervalB,
                     direction: Direction) -> bool:
    """Certified check that both branch images of B stay inside B with a
    strictly positive radicand throughout.

    Evaluates branch extrema via the exact range of the radicand quadratic,
    not by sampling.  A positive radicand keeps the two branches disjoint;
    for the forward maps it is equivalent to the images excluding the
    origin.  Containment allows round-off slack because the extreme fixed
    point lies exactly on the boundary of B.
    """
    a = 1.0 - c
    beta = B.beta
    slack = _CONTAIN_TOL * max(1.0, beta)
    if direction is Direction.FORWARD:
        if a == 0.0:
            return False
        lo, hi = _quad_range(-c, r, 1.0, beta)
        if a > 0.0:
            if lo <= 0.0:
                return False
            return math.sqrt(hi / a) <= beta + slack
        if hi >= 0.0:
            return False
        return math.sqrt(lo / a) <= beta + slack
    if c == 0.0:
        return False
    lo, hi = _quad_range(-4.0 * a * c, 0.0, r * r + 4.0 * c, beta)
    if lo <= 0.0:
        return False
    sq_lo, sq_hi = math.sqrt(lo), math.sqrt(hi)
    for s in (1.0, -1.0):
        e1 = (r + s * sq_lo) / (2.0 * c)
        e2 = (r + s * sq_hi) / (2.0 * c)
        if min(e1, e2) < -beta - slack or max(e1, e2) > beta + slack:
            return False
    return True


@dataclass(frozen=True)
class AIState:
    """A periodic point sequence on the AI curve with its symbol word.

    residual is the largest curve defect max_t |a*xi_t^2 + c*xi_{t-1}^2 -
    r*xi_{t-1} - 1| over one period, wrap-around included.
    """

    xi: tuple[float, ...]
    symbols: SymbolSequence
    r: float
    c: float
    direction: Direction
    residual: float

    @property
    def period(self) -> int:
        return len(self.xi)


def _curve_residual(xi, r, c) -> float:
    a = 1.0 - c
    n = len(xi)
    worst = 0.0
    for t in range(n):
        cur, prev = xi[t], xi[t - 1]
        worst = max(worst, abs(a * cur * cur + c * prev * prev - r * prev - 1.0))
    return worst


def default_max_iter(period: int, tol: float) -> int:
    """Step budget 10*period*ceil(log2(1/tol)), floored at 10000."""
    return max(10000, 10 * period * math.ceil(math.log(1.0 / tol) / math.log(2.0)))


def ai_state_from_symbols(seq: SymbolSequence, r: float, c: float,
                          direction: Direction = Direction.FORWARD,
                          tol: float = 1e-12, max_iter: int | None = None,
                          seed: float | None = None) -> AIState:
    """Construct the AI state coded by a periodic symbol word.

    Iterates the branch maps cyclically through the word from a seed in B
    until two successive period blocks agree to within tol in sup norm.
    Backward construction consumes the word in reversed time order so the
    stored state always reads forward in t.  The default seed is beta/2
    with the sign of the first symbol (the origin itself is sign-ambiguous).
    """
    n = seq.period
    if max_iter is None:
        max_iter = default_max_iter(n, tol)
    if seed is None:
        beta = beta_for(r, c, direction).beta
        seed = 0.5 * beta * (1.0 if seq[0] > 0 else -1.0)

    xi = float(seed)
    prev_block: list[float] | None = None
    steps = 0
    while steps < max_iter:
        block = [0.0] * n
        if direction is Direction.FORWARD:
            for t in range(n):
                xi = ai_forward(xi, seq[t], r, c)
                block[t] = xi
        else:
            for t in range(n - 1, -1, -1):
                xi = ai_backward(xi, seq[t], r, c)
                block[t] = xi
        steps += n
        if prev_block is not None:
            if max(abs(u - v) for u, v in zip(block, prev_block)) < tol:
                for t in range(n):
                    if block[t] == 0.0 or (block[t] > 0) != (seq[t] > 0):
                        raise NumericalFailure(
                            "constructed state has a sign inconsistent with "
                            f"its symbol at index {t}")
                return AIState(xi=tuple(block), symbols=seq, r=r, c=c,
                               direction=direction,
                               residual=_curve_residual(block, r, c))
        prev_block = block
    raise ConvergenceFailure(
        f"AI-state iteration did not converge within {max_iter} steps")
