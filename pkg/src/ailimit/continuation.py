"""Pseudo-arclength continuation of periodic AI states in epsilon.

A period-n orbit of the rescaled difference equation is a zero of
G: R^n x R -> R^n whose component t is the one-step residual at the cyclic
4-tuple (xi_{t+1}, xi_t, xi_{t-1}, xi_{t-2}).  Starting from an AI state at
eps = 0, each continuation step predicts along the unit tangent of the
branch and corrects back onto {G = 0} inside the hyperplane orthogonal to
the tangent at arclength ell, using Broyden's quasi-Newton method with a
QR-factored approximate Jacobian updated by rank-one QR updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg as sla

from .correspondence import Direction, ai_state_from_symbols
from .errors import CorrectorFailure, TangentFailure
from .symbols import SymbolSequence

__all__ = [
    "PeriodicState",
    "Tangent",
    "BranchPoint",
    "Branch",
    "Termination",
    "ContinuationConfig",
    "residual_G",
    "jacobian_G",
    "initial_tangent",
    "next_tangent",
    "corrector",
    "continue_branch",
    "detect_turning_points",
    "doubling_curve_alpha",
    "double_sequence",
]


@dataclass(frozen=True)
class PeriodicState:
    """Period-n orbit candidate (cyclic xi values) at one epsilon."""

    xi: np.ndarray
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        if self.xi.ndim != 1 or len(self.xi) < 1:
            raise ValueError("state needs at least one xi entry")


@dataclass(frozen=True)
class Tangent:
    xi_dot: np.ndarray
    eps_dot: float

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.xi_dot, [self.eps_dot]])

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "Tangent":
        return cls(xi_dot=np.array(v[:-1]), eps_dot=float(v[-1]))


@dataclass(frozen=True)
class BranchPoint:
    state: PeriodicState
    tangent: Tangent
    residual_norm: float
    step_len: float


class Termination(Enum):
    EPSILON_TURNAROUND = "epsilon-turnaround"
    STEP_UNDERFLOW = "step-underflow"
    CORRECTOR_FAILURE = "corrector-failure"
    EPSILON_LIMIT = "epsilon-limit"
    MAX_STEPS = "max-steps"


@dataclass
class Branch:
    points: list[BranchPoint]
    termination: Termination
    symbols: SymbolSequence
    log: list[str] = field(default_factory=list)

    @property
    def max_epsilon(self) -> float:
        return max(p.state.epsilon for p in self.points)


@dataclass(frozen=True)
class ContinuationConfig:
    """Knobs of the predictor-corrector loop.

    ell0 = None picks 1e-2 for periods below 10 and 1e-1 otherwise.
    eps_max and max_steps bound branches that never turn around.
    """

    ell0: float | None = None
    ell_min: float = 1e-15
    jump_threshold: float = 0.1
    corrector_tol: float = 1e-12
    max_corrector_iters: int = 150
    initial_eps_dot: float = 0.005
    eps_max: float = 1.6
    max_steps: int = 100000

    def initial_step(self, period: int) -> float:
        if self.ell0 is not None:
            return self.ell0
        return 1e-2 if period < 10 else 1e-1


def residual_G(state: PeriodicState, r: float, c: float, delta: float,
               b: float = 0.0) -> np.ndarray:
    """Cyclic residual vector; component t couples xi_{t-2}..xi_{t+1}."""
    a = 1.0 - b - c
    xi = state.xi
    eps = state.epsilon
    xp = np.roll(xi, -1)
    xm = np.roll(xi, 1)
    xmm = np.roll(xi, 2)
    return (a * xi * xi + b * xi * xm + c * xm * xm - r * xm - 1.0
            - eps * (xp - delta * xmm))


def jacobian_G(state: PeriodicState, r: float, c: float, delta: float,
               b: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Analytic partials (dG/dxi, dG/deps).

    dG/dxi is cyclic-banded with four wrapped diagonals; for n <= 3 the
    wrapped columns collide and the entries accumulate additively.
    """
    a = 1.0 - b - c
    xi = state.xi
    eps = state.epsilon
    n = len(xi)
    xp = np.roll(xi, -1)
    xm = np.roll(xi, 1)
    xmm = np.roll(xi, 2)
    idx = np.arange(n)
    M = np.zeros((n, n))
    np.add.at(M, (idx, (idx + 1) % n), -eps)
    np.add.at(M, (idx, idx), 2.0 * a * xi + b * xm)
    np.add.at(M, (idx, (idx - 1) % n), b * xi + 2.0 * c * xm - r)
    np.add.at(M, (idx, (idx - 2) % n), eps * delta)
    d_eps = -(xp - delta * xmm)
    return M, d_eps


def initial_tangent(state: PeriodicState, r: float, c: float, delta: float,
                    cfg: ContinuationConfig) -> Tangent:
    """First direction vector (xi_dot, initial_eps_dot), with xi_dot from
    the linear system dG/dxi * xi_dot = -dG/deps * eps_dot.  Returned
    unnormalized; the stepper normalizes before predicting."""
    M, de = jacobian_G(state, r, c, delta)
    try:
        xi_dot = np.linalg.solve(M, -de * cfg.initial_eps_dot)
    except np.linalg.LinAlgError as exc:
        raise TangentFailure(f"initial tangent system is singular: {exc}")
    return Tangent(xi_dot=xi_dot, eps_dot=cfg.initial_eps_dot)


def _bordered(state, tangent, r, c, delta):
    n = len(state.xi)
    M, de = jacobian_G(state, r, c, delta)
    J = np.zeros((n + 1, n + 1))
    J[:n, :n] = M
    J[:n, n] = de
    J[n, :] = tangent.as_vector()
    return J


def next_tangent(prev: BranchPoint, r: float, c: float,
                 delta: float) -> Tangent:
    """Unit tangent at an accepted point: solve the bordered system with
    the previous tangent as last row and rhs (0, ..., 0, 1), then
    normalize.  The last row makes the pre-normalization inner product
    with the previous tangent equal one, so orientation is preserved."""
    J = _bordered(prev.state, prev.tangent, r, c, delta)
    rhs = np.zeros(len(prev.state.xi) + 1)
    rhs[-1] = 1.0
    try:
        v = np.linalg.solve(J, rhs)
    except np.linalg.LinAlgError as exc:
        raise TangentFailure(f"bordered tangent system is singular: {exc}")
    v = v / np.linalg.norm(v)
    if float(v @ prev.tangent.as_vector()) <= 0.0:
        raise TangentFailure("tangent orientation flipped")
    return Tangent.from_vector(v)


def corrector(predicted: PeriodicState, prev: BranchPoint, r: float, c: float,
              delta: float, cfg: ContinuationConfig) -> BranchPoint:
    """Solve {G = 0, tangent . (u - u_prev) = ell} from the predictor point.

    The approximate Jacobian starts from the analytic partials plus the
    tangent row, held in QR form; each Broyden step applies a rank-one QR
    update.  Accepts when both the residual and the arclength row are below
    corrector_tol in sup norm; iterates wandering further than 10 from the
    predictor are declared divergent.
    """
    n = len(predicted.xi)
    v = prev.tangent.as_vector()
    u_prev = np.concatenate([prev.state.xi, [prev.state.epsilon]])
    u = np.concatenate([predicted.xi, [predicted.epsilon]])
    u_pred = u.copy()
    ell = float(v @ (u - u_prev))

    def full_residual(uu):
        st = PeriodicState(xi=uu[:n], epsilon=float(uu[n]))
        return np.concatenate([residual_G(st, r, c, delta),
                               [float(v @ (uu - u_prev)) - ell]])

    J = _bordered(PeriodicState(xi=u[:n], epsilon=float(u[n])),
                  prev.tangent, r, c, delta)
    try:
        Q, R = sla.qr(J)
    except ValueError as exc:
        raise CorrectorFailure(f"QR factorization failed: {exc}")
    F = full_residual(u)
    for _ in range(cfg.max_corrector_iters):
        if (np.max(np.abs(F[:n])) < cfg.corrector_tol
                and abs(F[n]) < cfg.corrector_tol):
            state = PeriodicState(xi=u[:n], epsilon=float(u[n]))
            res = float(np.max(np.abs(residual_G(state, r, c, delta))))
            return BranchPoint(state=state, tangent=prev.tangent,
                               residual_norm=res, step_len=ell)
        try:
            du = sla.solve_triangular(R, Q.T @ (-F))
        except (ValueError, sla.LinAlgError) as exc:
            raise CorrectorFailure(f"triangular solve failed: {exc}")
        if not np.all(np.isfinite(du)):
            raise CorrectorFailure("corrector produced non-finite step")
        u_new = u + du
        if np.linalg.norm(u_new - u_pred) > 10.0:
            raise CorrectorFailure("corrector iterate left the trust ball")
        F_new = full_residual(u_new)
        w = (F_new - F - J @ du) / float(du @ du)
        J += np.outer(w, du)
        Q, R = sla.qr_update(Q, R, w, du)
        u, F = u_new, F_new
    raise CorrectorFailure(
        f"corrector did not converge in {cfg.max_corrector_iters} iterations")


def continue_branch(seq: SymbolSequence, r: float, c: float, delta: float,
                    cfg: ContinuationConfig | None = None,
                    direction: Direction = Direction.FORWARD) -> Branch:
    """Follow the solution branch of a symbol word from the AI limit.

    Starts at the AI state (eps = 0), then alternates predictor and
    corrector.  The step ell halves whenever the corrector fails or the
    accepted point jumps further than jump_threshold (sup norm over xi and
    eps jointly) from the previous point; failed steps are re-predicted.
    Stops at the first epsilon decrease (turnaround), when ell underflows,
    when retries are exhausted, or at the eps_max / max_steps bounds.
    """
    if cfg is None:
        cfg = ContinuationConfig()
    n = seq.period
    ell = cfg.initial_step(n)
    ai = ai_state_from_symbols(seq, r, c, direction=direction,
                               tol=cfg.corrector_tol)
    state = PeriodicState(xi=np.array(ai.xi), epsilon=0.0)
    res0 = float(np.max(np.abs(residual_G(state, r, c, delta))))
    raw = initial_tangent(state, r, c, delta, cfg)
    v = raw.as_vector()
    tangent = Tangent.from_vector(v / np.linalg.norm(v))
    log: list[str] = []
    points = [BranchPoint(state=state, tangent=tangent, residual_norm=res0,
                          step_len=0.0)]

    steps = 0
    while steps < cfg.max_steps:
        steps += 1
        prev = points[-1]
        u_prev = np.concatenate([prev.state.xi, [prev.state.epsilon]])
        pred_vec = u_prev + ell * prev.tangent.as_vector()
        predicted = PeriodicState(xi=pred_vec[:n], epsilon=float(pred_vec[n]))
        try:
            accepted = corrector(predicted, prev, r, c, delta, cfg)
        except CorrectorFailure:
            ell *= 0.5
            log.append(f"step {steps}: corrector failed, ell halved to {ell:g}")
            if ell < cfg.ell_min:
                return Branch(points=points,
                              termination=Termination.CORRECTOR_FAILURE,
                              symbols=seq, log=log)
            continue
        u_new = np.concatenate([accepted.state.xi, [accepted.state.epsilon]])
        if float(np.max(np.abs(u_new - u_prev))) > cfg.jump_threshold:
            ell *= 0.5
            log.append(f"step {steps}: jump beyond threshold, ell halved to {ell:g}")
            if ell < cfg.ell_min:
                return Branch(points=points,
                              termination=Termination.STEP_UNDERFLOW,
                              symbols=seq, log=log)
            continue
        try:
            tangent = next_tangent(accepted, r, c, delta)
        except TangentFailure:
            ell *= 0.5
            log.append(f"step {steps}: singular tangent, ell halved to {ell:g}")
            if ell < cfg.ell_min:
                return Branch(points=points,
                              termination=Termination.CORRECTOR_FAILURE,
                              symbols=seq, log=log)
            continue
        accepted = BranchPoint(state=accepted.state, tangent=tangent,
                               residual_norm=accepted.residual_norm,
                               step_len=accepted.step_len)
        points.append(accepted)
        if accepted.state.epsilon < prev.state.epsilon:
            return Branch(points=points,
                          termination=Termination.EPSILON_TURNAROUND,
                          symbols=seq, log=log)
        if accepted.state.epsilon > cfg.eps_max:
            return Branch(points=points, termination=Termination.EPSILON_LIMIT,
                          symbols=seq, log=log)
    return Branch(points=points, termination=Termination.MAX_STEPS,
                  symbols=seq, log=log)


def detect_turning_points(branch: Branch) -> list[tuple[float, float]]:
    """Interior local maxima of epsilon along the branch, reported as
    (epsilon, alpha) with alpha = -eps^-2."""
    if not branch.points:
        raise ValueError("branch has no points")
    eps = [p.state.epsilon for p in branch.points]
    out = []
    for i in range(1, len(eps) - 1):
        if eps[i] >= eps[i - 1] and eps[i] > eps[i + 1]:
            e = eps[i]
            alpha = -math.inf if e == 0.0 else -1.0 / (e * e)
            out.append((e, alpha))
    return out


def doubling_curve_alpha(r: float, delta: float) -> tuple[float, float] | None:
    """Roots in alpha of the fixed-point doubling curve

    (3r^2-4)^2 a^2 + 2((5d^2+6d+9)r^2 - 4d^2 + 8d + 12) a + (d+1)^2 (d-3)^2

    ordered ascending; None when the roots are complex."""
    A = (3.0 * r * r - 4.0) ** 2
    if A == 0.0:
        raise ValueError("doubling curve degenerates at |r| = 2/sqrt(3)")
    B = 2.0 * ((5.0 * delta * delta + 6.0 * delta + 9.0) * r * r
               - 4.0 * delta * delta + 8.0 * delta + 12.0)
    C = (delta + 1.0) ** 2 * (delta - 3.0) ** 2
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    lo = (-B - sq) / (2.0 * A)
    hi = (-B + sq) / (2.0 * A)
    return lo, hi


def double_sequence(seq: SymbolSequence) -> SymbolSequence:
    """Word of the period-doubled orbit: the word twice, first sign flipped."""
    doubled = list(seq.symbols) + list(seq.symbols)
    doubled[0] = -doubled[0]
    return SymbolSequence(tuple(doubled))
