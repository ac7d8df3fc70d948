"""Parameter-plane regions where symbol words pin down unique AI states.

Two families of sets over the (r, c) plane:

* contraction regions at depth n: some composition of n branch maps has
  sup-slope below one on the trapping interval B, estimated numerically by
  chain-rule products over every length-n symbol word and a fan of seeds;
* maps-into regions: the branch images merely stay inside B, with closed
  forms built from the roots of a cubic in c.

Masks live on a regular inclusive lattice so they can be compared with a
discrete Hausdorff distance.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .correspondence import Direction, IntervalB, beta_for, verify_maps_into
from .errors import IntervalUndefined, InvalidInput

__all__ = [
    "ParamGrid",
    "RegionMask",
    "derivative_norm_estimate",
    "compute_Rn",
    "compute_RA",
    "cubic_C_roots",
    "analytic_RA_forward",
    "analytic_RA_backward",
    "hausdorff_distance",
]

# Seeds sit on an even lattice spanning B with the end seeds pulled inward
# by this relative amount, since the radicand may vanish exactly at the ends.
_SEED_NUDGE = 1e-9


@dataclass(frozen=True)
class ParamGrid:
    """Regular inclusive lattice over a rectangle in the (r, c) plane."""

    r_min: float
    r_max: float
    c_min: float
    c_max: float
    nr: int
    nc: int

    def __post_init__(self):
        if not (self.r_min < self.r_max and self.c_min < self.c_max):
            raise InvalidInput("grid bounds must satisfy min < max")
        if self.nr < 2 or self.nc < 2:
            raise InvalidInput("grid needs at least 2 points per axis")

    @property
    def r_values(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.nr)

    @property
    def c_values(self) -> np.ndarray:
        return np.linspace(self.c_min, self.c_max, self.nc)

    @property
    def r_spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.nr - 1)

    @property
    def c_spacing(self) -> float:
        return (self.c_max - self.c_min) / (self.nc - 1)


@dataclass(frozen=True)
class RegionMask:
    """Per-cell labels on a ParamGrid.

    For contraction masks, label k > 0 is the smallest depth at which the
    slope test passed (so membership at depth n means 0 < label <= n); 0
    marks non-members.  Maps-into masks use labels 0/1 and kind
    "maps-into".
    """

    grid: ParamGrid
    labels: np.ndarray
    direction: Direction
    kind: str = "contraction"
    n_max: int = 0

    def member_points(self, n: int | None = None) -> np.ndarray:
        """(r, c) coordinates of member cells; for contraction masks
        restricted to labels <= n when n is given."""
        lab = self.labels
        mask = lab > 0 if n is None else (lab > 0) & (lab <= n)
        ii, jj = np.nonzero(mask)
        rv, cv = self.grid.r_values, self.grid.c_values
        return np.column_stack([rv[ii], cv[jj]])


def _branch_level(X, D, r, c, direction):
    """Advance one tree level: map every node through both branches and
    accumulate |slope| products.  Nodes with a nonpositive radicand get an
    infinite product (the word is not defined there)."""
    a = 1.0 - c
    with np.errstate(invalid="ignore", divide="ignore"):
        if direction is Direction.FORWARD:
            rho = -c * X * X + r * X + 1.0
            arho = a * rho
            good = arho > 0.0
            val = np.sqrt(np.where(good, rho / a, 0.0))
            der = np.where(good,
                           np.abs(r - 2.0 * c * X)
                           / (2.0 * np.sqrt(np.abs(arho))), np.inf)
            Dn = D * der
            return np.concatenate([val, -val]), np.concatenate([Dn, Dn])
        rho = (r * r + 4.0 * c) - 4.0 * a * c * X * X
        good = rho > 0.0
        sq = np.sqrt(np.where(good, rho, 1.0))
        der = np.where(good, np.abs(2.0 * a * X) / sq, np.inf)
        gp = np.where(good, (r + sq) / (2.0 * c), 0.0)
        gm = np.where(good, (r - sq) / (2.0 * c), 0.0)
        Dn = D * der
        return np.concatenate([gp, gm]), np.concatenate([Dn, Dn])


def _seed_line(beta: float, num_seeds: int) -> np.ndarray:
    edge = beta * (1.0 - _SEED_NUDGE)
    return np.linspace(-edge, edge, num_seeds)


def _sweep_levels(r, c, n_max, direction, num_seeds):
    """Level maxima of the |slope|-product tree, or None when no certified
    interval exists at (r, c)."""
    try:
        B = beta_for(r, c, direction)
    except IntervalUndefined:
        return None
    if not verify_maps_into(r, c, B, direction):
        return None
    X = _seed_line(B.beta, num_seeds)
    D = np.ones_like(X)
    maxima = []
    for _ in range(n_max):
        X, D = _branch_level(X, D, r, c, direction)
        m = float(np.max(D))
        maxima.append(m)
        if m < 1.0:
            break
    return maxima


def derivative_norm_estimate(r: float, c: float, n: int, direction: Direction,
                             num_seeds: int = 100) -> float:
    """Numerical sup of |d/dx f_{s_n} o ... o f_{s_1}| over B, all length-n
    words and num_seeds seeds.  Returns +inf when the trapping interval is
    undefined or the maps-into check fails."""
    if n < 1:
        raise InvalidInput("composition depth must be >= 1")
    try:
        B = beta_for(r, c, direction)
    except IntervalUndefined:
        return math.inf
    if not verify_maps_into(r, c, B, direction):
        return math.inf
    X = _seed_line(B.beta, num_seeds)
    D = np.ones_like(X)
    for _ in range(n):
        X, D = _branch_level(X, D, r, c, direction)
    return float(np.max(D))


def _cell_label(r, c, n_max, direction, num_seeds) -> int:
    maxima = _sweep_levels(r, c, n_max, direction, num_seeds)
    if maxima is None:
        return 0
    if maxima[-1] < 1.0:
        return len(maxima)
    return 0


def _row_labels(args):
    i, r, c_values, n_max, direction_value, num_seeds = args
    direction = Direction(direction_value)
    row = np.zeros(len(c_values), dtype=np.int32)
    for j, c in enumerate(c_values):
        row[j] = _cell_label(r, float(c), n_max, direction, num_seeds)
    return i, row


def compute_Rn(grid: ParamGrid, n_max: int, direction: Direction,
               num_seeds: int = 100, threads: int | None = None) -> RegionMask:
    """Contraction mask: per cell the smallest depth n <= n_max at which the
    slope-product test passes (0 if none).  One tree sweep per cell serves
    every depth, stopping at the first passing level; rows are computed
    independently so the result does not depend on the worker count."""
    if n_max < 1:
        raise InvalidInput("n_max must be >= 1")
    rv = grid.r_values
    cv = grid.c_values
    labels = np.zeros((grid.nr, grid.nc), dtype=np.int32)
    jobs = [(i, float(r), cv, n_max, direction.value, num_seeds)
            for i, r in enumerate(rv)]
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1:
        for job in jobs:
            i, row = _row_labels(job)
            labels[i] = row
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for i, row in pool.map(_row_labels, jobs, chunksize=8):
                labels[i] = row
    return RegionMask(grid=grid, labels=labels, direction=direction,
                      kind="contraction", n_max=n_max)


def cubic_C_roots(r: float) -> tuple[float | None, float | None, float]:
    """Real roots, ascending, of

        P(c) = 64c^3 + 32(r^2 - 2)c^2 + (r^2 - 4)(5r^2 - 4)c - 4r^4.

    All three are real exactly when |r| < 2*sqrt(2)/5 (the discriminant is
    2^8 r^2 (r^2+4)^4 (8 - 25 r^2)); otherwise only the largest exists and
    the first two slots are None.  Roots come from the trigonometric /
    Cardano formulas with one Newton polish step each, which repairs the
    double root at r = 0.
    """
    r2 = r * r
    b2 = 32.0 * (r2 - 2.0) / 64.0
    b1 = (r2 - 4.0) * (5.0 * r2 - 4.0) / 64.0
    b0 = -4.0 * r2 * r2 / 64.0
    # depressed cubic t^3 + P t + Q, c = t - b2/3
    P = b1 - b2 * b2 / 3.0
    Q = 2.0 * b2 ** 3 / 27.0 - b2 * b1 / 3.0 + b0
    shift = -b2 / 3.0
    disc = -4.0 * P ** 3 - 27.0 * Q * Q

    def polish(c):
        for _ in range(2):
            p = ((64.0 * c + 32.0 * (r2 - 2.0)) * c
                 + (r2 - 4.0) * (5.0 * r2 - 4.0)) * c - 4.0 * r2 * r2
            dp = (192.0 * c + 64.0 * (r2 - 2.0)) * c + (r2 - 4.0) * (5.0 * r2 - 4.0)
            if dp == 0.0 or not math.isfinite(dp):
                return c
            step = p / dp
            if abs(step) > 1e-2:
                return c
            c = c - step
        return c

    if disc >= 0.0 and P < 0.0:
        m = 2.0 * math.sqrt(-P / 3.0)
        arg = 3.0 * Q / (P * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg)
        roots = sorted(m * math.cos((theta - 2.0 * math.pi * k) / 3.0) + shift
                       for k in range(3))
        c1, c2, c3 = (polish(x) for x in roots)
        return c1, c2, c3
    # single real root by Cardano
    half_q = -Q / 2.0
    inner = math.sqrt(max(0.0, half_q * half_q + (P / 3.0) ** 3))
    u = math.copysign(abs(half_q + inner) ** (1.0 / 3.0), half_q + inner)
    v = math.copysign(abs(half_q - inner) ** (1.0 / 3.0), half_q - inner)
    return None, None, polish(u + v + shift)


def analytic_RA_forward(r: float, c: float) -> bool:
    """Closed-form maps-into membership for the forward branch pair:

    |r| <= 2/sqrt(15):            c < C2(r)
    2/sqrt(15) <= |r| <= 2/sqrt(3): c < 1 + |r|(|r| - sqrt(r^2 + 4))
    |r| >= 2/sqrt(3):             c < -r^2/4
    """
    R = abs(r)
    if R <= 2.0 / math.sqrt(15.0):
        return c < cubic_C_roots(r)[1]
    if R <= 2.0 / math.sqrt(3.0):
        return c < 1.0 + R * (R - math.sqrt(r * r + 4.0))
    return c < -r * r / 4.0


def analytic_RA_backward(r: float, c: float) -> bool:
    """Closed-form maps-into membership for the backward pair: c > C3(r)."""
    return c > cubic_C_roots(r)[2]


def compute_RA(grid: ParamGrid, direction: Direction) -> RegionMask:
    """Boolean maps-into mask from the closed forms, on the same lattice."""
    member = (analytic_RA_forward if direction is Direction.FORWARD
              else analytic_RA_backward)
    rv, cv = grid.r_values, grid.c_values
    labels = np.zeros((grid.nr, grid.nc), dtype=np.int32)
    for i, r in enumerate(rv):
        for j, c in enumerate(cv):
            labels[i, j] = 1 if member(float(r), float(c)) else 0
    return RegionMask(grid=grid, labels=labels, direction=direction,
                      kind="maps-into")


def hausdorff_distance(A: RegionMask, B: RegionMask) -> float:
    """Discrete Hausdorff distance between member cell centers under the
    Euclidean (r, c) metric.  Requires identical grids and nonempty sets."""
    if A.grid != B.grid:
        raise InvalidInput("masks live on different grids")
    pa = A.member_points()
    pb = B.member_points()
    if len(pa) == 0 or len(pb) == 0:
        raise InvalidInput("Hausdorff distance is undefined for an empty set")
    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return float(max(d_ab, d_ba))
