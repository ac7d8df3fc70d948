"""Attractor classification over the (alpha, r) plane.

Each cell iterates the scalar recurrence from a point just off the lower
fixed point (or an explicit initial state), discards a transient, then
labels the attractor: diverged when |x| ever exceeds kappa_max, periodic by
the smallest close return of the delayed 3-vector, otherwise regular or
chaotic by the sign of the maximal Lyapunov exponent.  Close-return mining
and symbol extraction turn a chaotic orbit into periodic symbol words for
the continuation pipeline.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import MapParams, State3, fixed_point_x_minus
from .errors import DivergedOrbit, InvalidInput
from .symbols import SymbolSequence

__all__ = [
    "ScanConfig",
    "ScanGrid",
    "ScanCell",
    "ScanResult",
    "OrbitClass",
    "fixed_point_x_minus",
    "classify_cell",
    "attractor_scan",
    "max_lyapunov",
    "close_returns",
    "symbols_from_orbit",
]


class OrbitClass:
    DIVERGED = "diverged"
    PERIODIC = "periodic"
    REGULAR = "regular"
    CHAOTIC = "chaotic"

    ALL = (DIVERGED, PERIODIC, REGULAR, CHAOTIC)


@dataclass(frozen=True)
class ScanConfig:
    """Knobs of the per-cell classification."""

    kappa_max: float
    transient_T: int = 5000
    return_tol: float = 1e-4
    period_max: int = 90
    ic_offset: float = 0.001
    explicit_ic: State3 | None = None
    lyap_steps: int = 20000
    lyap_discard: int = 1000
    chaos_threshold: float = 0.01

    def __post_init__(self):
        if self.kappa_max <= 0 or self.transient_T <= 0 or self.period_max < 1:
            raise InvalidInput("scan config values must be positive")


@dataclass(frozen=True)
class ScanGrid:
    """Regular inclusive lattice over a rectangle in the (alpha, r) plane."""

    alpha_min: float
    alpha_max: float
    r_min: float
    r_max: float
    na: int
    nr: int

    def __post_init__(self):
        if not (self.alpha_min < self.alpha_max and self.r_min < self.r_max):
            raise InvalidInput("grid bounds must satisfy min < max")
        if self.na < 2 or self.nr < 2:
            raise InvalidInput("grid needs at least 2 points per axis")
        if self.alpha_max >= 0.0:
            raise InvalidInput("scan requires alpha < 0 throughout")

    @property
    def alpha_values(self) -> np.ndarray:
        return np.linspace(self.alpha_min, self.alpha_max, self.na)

    @property
    def r_values(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.nr)

    @property
    def alpha_spacing(self) -> float:
        return (self.alpha_max - self.alpha_min) / (self.na - 1)


@dataclass(frozen=True)
class ScanCell:
    classification: str
    period: int | None = None
    lyapunov: float | None = None


@dataclass(frozen=True)
class ScanResult:
    grid: ScanGrid
    cells: list[list[ScanCell]]  # indexed [i_alpha][j_r]


def _step(x, y, z, alpha, sigma, tau, a, b, c, delta):
    return delta * z + alpha + tau * x - sigma * y + (a * x * x + b * x * y
                                                      + c * y * y)


def max_lyapunov(ic: State3, params: MapParams, cfg: ScanConfig) -> float:
    """Average log growth rate of a tangent vector pushed through the map
    Jacobian, renormalized every step; natural-log units per step.  The
    first lyap_discard steps are excluded from the average."""
    x, y, z = ic
    p = params
    v0, v1, v2 = 1.0, 0.0, 0.0
    total = 0.0
    for t in range(cfg.lyap_discard + cfg.lyap_steps):
        # Jacobian rows: (tau + 2ax + by, -sigma + bx + 2cy, delta), shifts
        w0 = ((p.tau + 2.0 * p.a * x + p.b * y) * v0
              + (-p.sigma + p.b * x + 2.0 * p.c * y) * v1 + p.delta * v2)
        w1, w2 = v0, v1
        norm = math.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
        if norm == 0.0 or not math.isfinite(norm):
            raise DivergedOrbit("tangent vector degenerated")
        v0, v1, v2 = w0 / norm, w1 / norm, w2 / norm
        if t >= cfg.lyap_discard:
            total += math.log(norm)
        xn = _step(x, y, z, p.alpha, p.sigma, p.tau, p.a, p.b, p.c, p.delta)
        x, y, z = xn, x, y
        if abs(xn) > cfg.kappa_max or not math.isfinite(xn):
            raise DivergedOrbit("orbit left the bounded region")
    return total / cfg.lyap_steps


def classify_cell(alpha: float, r: float, params: MapParams,
                  cfg: ScanConfig) -> ScanCell:
    """Classify the attractor reached from the cell's initial condition.

    sigma is tied to the cell through sigma = r*sqrt(-alpha); the alpha and
    sigma fields of params are replaced accordingly.  Divergence means some
    |x_t| > kappa_max.  The period search takes the smallest p in
    [1, period_max] whose delayed 3-vector (x_{T+p+2}, x_{T+p+1}, x_{T+p})
    returns to (x_{T+2}, x_{T+1}, x_T) within return_tol (Euclidean).
    """
    if alpha >= 0.0:
        raise InvalidInput("classification requires alpha < 0")
    sigma = r * math.sqrt(-alpha)
    p = params.with_alpha_sigma(alpha, sigma)
    if cfg.explicit_ic is not None:
        x, y, z = cfg.explicit_ic
    else:
        xm = fixed_point_x_minus(alpha, sigma, p.delta)
        x, y, z = xm + cfg.ic_offset, xm, xm
    for _ in range(cfg.transient_T):
        xn = _step(x, y, z, p.alpha, p.sigma, p.tau, p.a, p.b, p.c, p.delta)
        x, y, z = xn, x, y
        if abs(xn) > cfg.kappa_max or not math.isfinite(xn):
            return ScanCell(OrbitClass.DIVERGED)
    xs = [x]
    for _ in range(cfg.period_max + 2):
        xn = _step(x, y, z, p.alpha, p.sigma, p.tau, p.a, p.b, p.c, p.delta)
        x, y, z = xn, x, y
        if abs(xn) > cfg.kappa_max or not math.isfinite(xn):
            return ScanCell(OrbitClass.DIVERGED)
        xs.append(xn)
    for period in range(1, cfg.period_max + 1):
        d0 = xs[period + 2] - xs[2]
        d1 = xs[period + 1] - xs[1]
        d2 = xs[period] - xs[0]
        if math.sqrt(d0 * d0 + d1 * d1 + d2 * d2) < cfg.return_tol:
            return ScanCell(OrbitClass.PERIODIC, period=period)
    try:
        lam = max_lyapunov(State3(x, y, z), p, cfg)
    except DivergedOrbit:
        return ScanCell(OrbitClass.DIVERGED)
    if lam > cfg.chaos_threshold:
        return ScanCell(OrbitClass.CHAOTIC, lyapunov=lam)
    return ScanCell(OrbitClass.REGULAR, lyapunov=lam)


def _scan_row(args):
    i, alpha, r_values, params, cfg = args
    return i, [classify_cell(alpha, float(r), params, cfg) for r in r_values]


def attractor_scan(grid: ScanGrid, params: MapParams, cfg: ScanConfig,
                   threads: int | None = None) -> ScanResult:
    """Classify every cell of the grid.  Rows are independent, so the
    result is identical for any worker count."""
    alphas = grid.alpha_values
    rs = grid.r_values
    jobs = [(i, float(a), rs, params, cfg) for i, a in enumerate(alphas)]
    rows: list[list[ScanCell] | None] = [None] * grid.na
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1:
        for job in jobs:
            i, row = _scan_row(job)
            rows[i] = row
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for i, row in pool.map(_scan_row, jobs, chunksize=4):
                rows[i] = row
    return ScanResult(grid=grid, cells=rows)


def close_returns(ic: State3, params: MapParams, threshold: float,
                  max_steps: int) -> list[tuple[int, float]]:
    """All (p, distance) with ||state_p - state_0|| below threshold,
    Euclidean norm on the full 3D state.  Consecutive qualifying times
    belong to one return event and only the first is reported."""
    p = params
    x0, y0, z0 = ic
    x, y, z = x0, y0, z0
    events: list[tuple[int, float]] = []
    last_hit = -2
    for t in range(1, max_steps + 1):
        xn = _step(x, y, z, p.alpha, p.sigma, p.tau, p.a, p.b, p.c, p.delta)
        x, y, z = xn, x, y
        if not math.isfinite(x):
            raise DivergedOrbit(f"orbit diverged at step {t}")
        d = math.sqrt((x - x0) ** 2 + (y - y0) ** 2 + (z - z0) ** 2)
        if d < threshold:
            if t != last_hit + 1:
                events.append((t, d))
            last_hit = t
    return events


def symbols_from_orbit(orbit, epsilon: float) -> SymbolSequence:
    """Sign word of the rescaled orbit xi_t = eps*x_t."""
    if epsilon <= 0.0:
        raise InvalidInput("epsilon must be positive")
    return SymbolSequence.from_signs([epsilon * float(v) for v in orbit])
