import math

import numpy as np
import pytest

from ailimit import (Branch, BranchPoint, ContinuationConfig, PeriodicState,
                     SymbolSequence, Termination, ai_state_from_symbols,
                     continue_branch, corrector, detect_turning_points,
                     double_sequence, doubling_curve_alpha, fixed_points_ai,
                     initial_tangent, jacobian_G, next_tangent, residual_G)
from ailimit.continuation import Tangent

SC = dict(r=-0.18, c=0.0, delta=0.05)


def period1_xi(eps, r, delta, sign=-1):
    # closed form for the period-1 family: xi^2 - (r + eps(1-delta))xi - 1 = 0
    q = r + eps * (1.0 - delta)
    return 0.5 * (q + sign * math.sqrt(q * q + 4.0))


def test_residual_zero_at_fixed_point():
    _, xi_plus = fixed_points_ai(-0.18)
    st = PeriodicState(xi=[xi_plus], epsilon=0.0)
    assert abs(residual_G(st, **SC)[0]) < 1e-14


def test_residual_zero_at_constructed_state():
    state = ai_state_from_symbols(SymbolSequence.parse("--+-+"), -0.18, 0.0)
    st = PeriodicState(xi=np.array(state.xi), epsilon=0.0)
    assert np.max(np.abs(residual_G(st, **SC))) <= 1e-10


def test_residual_matches_direct_formula():
    from ailimit import RescaledParams, rescaled_residual
    rng = np.random.default_rng(17)
    r, c, delta = -0.3, 0.25, 0.4
    for n in (1, 2, 3, 6):
        xi = rng.uniform(-1.5, 1.5, size=n)
        eps = float(rng.uniform(0.0, 0.8))
        st = PeriodicState(xi=xi, epsilon=eps)
        G = residual_G(st, r=r, c=c, delta=delta)
        q = RescaledParams(epsilon=eps, r=r)
        for t in range(n):
            direct = rescaled_residual(xi[(t + 1) % n], xi[t], xi[(t - 1) % n],
                                       xi[(t - 2) % n], q, a=1.0 - c, b=0.0,
                                       c=c, delta=delta)
            assert G[t] == pytest.approx(direct, rel=1e-13, abs=1e-14)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(19)
    r, c, delta = -0.18, 0.1, 0.05
    for n in (1, 2, 3, 5, 8):
        for _ in range(20):
            xi = rng.uniform(-1.5, 1.5, size=n)
            eps = float(rng.uniform(0.0, 1.0))
            st = PeriodicState(xi=xi, epsilon=eps)
            M, de = jacobian_G(st, r=r, c=c, delta=delta)
            for k in range(n):
                h = 1e-6 * (1.0 + abs(xi[k]))
                up = xi.copy(); up[k] += h
                dn = xi.copy(); dn[k] -= h
                col = (residual_G(PeriodicState(up, eps), r=r, c=c, delta=delta)
                       - residual_G(PeriodicState(dn, eps), r=r, c=c,
                                    delta=delta)) / (2.0 * h)
                np.testing.assert_allclose(M[:, k], col, rtol=1e-6, atol=1e-6)
            h = 1e-6
            col = (residual_G(PeriodicState(xi, eps + h), r=r, c=c, delta=delta)
                   - residual_G(PeriodicState(xi, eps - h), r=r, c=c,
                                delta=delta)) / (2.0 * h)
            np.testing.assert_allclose(de, col, rtol=1e-6, atol=1e-6)


def test_jacobian_epsilon_bands_vanish_at_limit():
    st = PeriodicState(xi=np.array([0.4, -1.1, 0.7, 0.9]), epsilon=0.0)
    M, _ = jacobian_G(st, r=0.2, c=0.3, delta=0.5)
    n = 4
    for t in range(n):
        assert M[t, (t + 1) % n] == 0.0
        assert M[t, (t - 2) % n] == 0.0


def test_jacobian_period1_collapses_to_partial_sum():
    xi, eps = 0.8, 0.3
    r, c, delta = -0.1, 0.2, 0.4
    a = 1.0 - c
    st = PeriodicState(xi=[xi], epsilon=eps)
    M, _ = jacobian_G(st, r=r, c=c, delta=delta)
    expected = -eps + 2.0 * a * xi + (2.0 * c * xi - r) + eps * delta
    assert M[0, 0] == pytest.approx(expected, rel=1e-14)


def test_initial_tangent_fixed_point_hand_solve():
    delta = 0.05
    st = PeriodicState(xi=[1.0], epsilon=0.0)  # xi_+ at r = 0, c = 0
    cfg = ContinuationConfig()
    tan = initial_tangent(st, r=0.0, c=0.0, delta=delta, cfg=cfg)
    assert tan.eps_dot == 0.005
    assert tan.xi_dot[0] == pytest.approx(-0.005 * (1.0 - delta) / 2.0,
                                          rel=1e-12)
    # first-n-rows system holds to 1e-12
    M, de = jacobian_G(st, r=0.0, c=0.0, delta=delta)
    assert abs(M @ tan.xi_dot + de * tan.eps_dot)[0] < 1e-12


def test_initial_tangent_zero_eps_column():
    # delta = 1 makes dG/deps vanish for a period-1 state
    st = PeriodicState(xi=[1.0], epsilon=0.0)
    tan = initial_tangent(st, r=0.0, c=0.0, delta=1.0,
                          cfg=ContinuationConfig())
    assert tan.xi_dot[0] == 0.0


def test_next_tangent_constant_along_straight_branch():
    branch = continue_branch(SymbolSequence.parse("-"), **SC,
                             cfg=ContinuationConfig(eps_max=0.3))
    tangents = [p.tangent.as_vector() for p in branch.points[1:6]]
    for v in tangents:
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
    # the period-1 family is nearly straight: consecutive tangents agree
    for u, v in zip(tangents, tangents[1:]):
        assert float(u @ v) > 0.999999


def test_next_tangent_bordered_residual():
    branch = continue_branch(SymbolSequence.parse("-+"), **SC,
                             cfg=ContinuationConfig(eps_max=0.2))
    pt = branch.points[3]
    prev = branch.points[2]
    tan = next_tangent(prev, **SC)
    M, de = jacobian_G(prev.state, **SC)
    n = len(prev.state.xi)
    J = np.zeros((n + 1, n + 1))
    J[:n, :n] = M
    J[:n, n] = de
    J[n, :] = prev.tangent.as_vector()
    rhs = np.zeros(n + 1)
    rhs[n] = 1.0
    raw = np.linalg.solve(J, rhs)
    scale = np.linalg.norm(raw)
    assert np.max(np.abs(J @ (tan.as_vector() * scale) - rhs)) < 1e-10
    assert pt is not None


def test_corrector_accepts_exact_predictor():
    eps = 0.2
    xi = period1_xi(eps, SC["r"], SC["delta"])
    xi0 = period1_xi(0.19, SC["r"], SC["delta"])
    v = np.array([xi - xi0, eps - 0.19])
    v = v / np.linalg.norm(v)
    prev = BranchPoint(state=PeriodicState(xi=[xi0], epsilon=0.19),
                       tangent=Tangent(xi_dot=v[:1], eps_dot=float(v[1])),
                       residual_norm=0.0, step_len=0.0)
    predicted = PeriodicState(xi=[xi], epsilon=eps)
    cfg = ContinuationConfig()
    accepted = corrector(predicted, prev, **SC, cfg=cfg)
    assert accepted.residual_norm < 1e-12
    assert accepted.state.xi[0] == pytest.approx(xi, abs=1e-12)


def test_corrector_solution_in_arclength_hyperplane():
    branch = continue_branch(SymbolSequence.parse("-"), **SC,
                             cfg=ContinuationConfig(eps_max=0.4))
    for prev, cur in zip(branch.points, branch.points[1:]):
        v = prev.tangent.as_vector()
        du = np.concatenate([cur.state.xi - prev.state.xi,
                             [cur.state.epsilon - prev.state.epsilon]])
        assert abs(float(v @ du) - cur.step_len) < 1e-10


def test_period1_branch_matches_closed_form():
    branch = continue_branch(SymbolSequence.parse("-"), **SC,
                             cfg=ContinuationConfig(eps_max=1.5))
    assert branch.termination is Termination.EPSILON_LIMIT
    for pt in branch.points:
        expect = period1_xi(pt.state.epsilon, SC["r"], SC["delta"])
        assert pt.state.xi[0] == pytest.approx(expect, abs=1e-10)
        assert pt.residual_norm <= 1e-12


def test_branch_invariants_and_turnaround():
    branch = continue_branch(SymbolSequence.parse("-+"), **SC)
    assert branch.points[0].state.epsilon == 0.0
    state0 = ai_state_from_symbols(SymbolSequence.parse("-+"), -0.18, 0.0)
    np.testing.assert_allclose(branch.points[0].state.xi, state0.xi,
                               atol=1e-11)
    assert branch.termination is Termination.EPSILON_TURNAROUND
    assert branch.max_epsilon == pytest.approx(1.3136, abs=0.005)
    for prev, cur in zip(branch.points, branch.points[1:]):
        jump = max(np.max(np.abs(cur.state.xi - prev.state.xi)),
                   abs(cur.state.epsilon - prev.state.epsilon))
        assert jump <= 0.1 + 1e-12
        assert cur.residual_norm <= 1e-12
    turning = detect_turning_points(branch)
    assert len(turning) == 1
    assert turning[0][0] == pytest.approx(1.3136, abs=0.005)


def test_saddle_node_pair_terminates_together():
    for word in ("--+", "-++"):
        branch = continue_branch(SymbolSequence.parse(word), **SC)
        assert branch.termination is Termination.EPSILON_TURNAROUND
        assert branch.max_epsilon == pytest.approx(0.6492, abs=0.005)


def test_detect_turning_points_monotone_and_synthetic():
    flat = continue_branch(SymbolSequence.parse("-"), **SC,
                           cfg=ContinuationConfig(eps_max=0.5))
    assert detect_turning_points(flat) == []

    def fake_point(eps):
        st = PeriodicState(xi=[0.0], epsilon=eps)
        return BranchPoint(state=st, tangent=Tangent(np.zeros(1), 1.0),
                           residual_norm=0.0, step_len=0.0)

    ks = np.arange(9)
    eps = 1.0 - 0.1 * (ks - 5.0) ** 2  # parabola with vertex at k = 5
    synthetic = Branch(points=[fake_point(float(e)) for e in eps],
                       termination=Termination.EPSILON_TURNAROUND,
                       symbols=SymbolSequence.parse("-"))
    found = detect_turning_points(synthetic)
    assert len(found) == 1
    assert found[0][0] == pytest.approx(1.0)
    assert found[0][1] == pytest.approx(-1.0)


def test_doubling_curve_values():
    lo, hi = doubling_curve_alpha(-0.18, 0.05)
    assert hi == pytest.approx(-0.579494815477836, abs=1e-12)
    both = doubling_curve_alpha(0.0, 0.0)
    assert both[0] == pytest.approx(-0.75, abs=1e-12)
    assert both[1] == pytest.approx(-0.75, abs=1e-12)
    # roots actually satisfy the quadratic
    for r, delta in ((-0.18, 0.05), (0.3, 0.4), (0.9, 1.0)):
        roots = doubling_curve_alpha(r, delta)
        A = (3 * r * r - 4.0) ** 2
        B = 2.0 * ((5 * delta ** 2 + 6 * delta + 9) * r * r
                   - 4 * delta ** 2 + 8 * delta + 12)
        C = (delta + 1.0) ** 2 * (delta - 3.0) ** 2
        for root in roots:
            assert A * root * root + B * root + C == pytest.approx(
                0.0, abs=1e-8 * max(A, B, C))
    assert doubling_curve_alpha(0.1, -2.0) is None
    with pytest.raises(ValueError):
        doubling_curve_alpha(2.0 / math.sqrt(3.0), 0.05)


def test_double_sequence_rule():
    assert str(double_sequence(SymbolSequence.parse("-"))) == "+-"
    assert str(double_sequence(SymbolSequence.parse("+-"))) == "--+-"
    seq = SymbolSequence.parse("-")
    cascade = ["+-", "--+-", "+-+---+-",
               "--+---+-" + "+-+---+-",
               "+-+---+-+-+---+-" + "--+---+-+-+---+-"]
    for expected in cascade:
        seq = double_sequence(seq)
        assert str(seq) == expected
