import math

import pytest

from ailimit import (MapParams, OrbitClass, ScanConfig, ScanGrid, State3,
                     SymbolSequence, attractor_scan, classify_cell,
                     close_returns, fixed_point_x_minus, max_lyapunov,
                     symbols_from_orbit)
from ailimit.errors import InvalidInput

SC_PARAMS = MapParams.structural(a=1.0, c=0.0, delta=0.05)
KAPPA = 3.26724


def sc_cfg(**kw):
    return ScanConfig(kappa_max=KAPPA, **kw)


def sc_map(alpha, r):
    return MapParams.reduced(alpha=alpha, sigma=r * math.sqrt(-alpha),
                             c=0.0, delta=0.05)


def test_classify_stable_fixed_point():
    cell = classify_cell(-0.4, -0.18, SC_PARAMS, sc_cfg())
    assert cell.classification == OrbitClass.PERIODIC
    assert cell.period == 1


def test_classify_period_five_shrimp():
    cell = classify_cell(-1.43, -0.18, SC_PARAMS, sc_cfg())
    assert cell.classification == OrbitClass.PERIODIC
    assert cell.period == 5


def test_classify_chaotic_cell():
    cell = classify_cell(-1.25, -0.18, SC_PARAMS, sc_cfg())
    assert cell.classification == OrbitClass.CHAOTIC
    assert cell.lyapunov > 0.0


def test_classify_diverged_cell():
    cell = classify_cell(-2.0, -0.18, SC_PARAMS, sc_cfg())
    assert cell.classification == OrbitClass.DIVERGED


def test_lyapunov_signs():
    p = sc_map(-0.4, -0.18)
    xm = fixed_point_x_minus(p.alpha, p.sigma, p.delta)
    cfg = sc_cfg(lyap_steps=5000)
    assert max_lyapunov(State3(xm + 0.001, xm, xm), p, cfg) < 0.0
    p2 = sc_map(-0.8, -0.18)  # inside the stable period-2 window
    xm2 = fixed_point_x_minus(p2.alpha, p2.sigma, p2.delta)
    assert max_lyapunov(State3(xm2 + 0.001, xm2, xm2), p2, cfg) < 0.0
    pc = sc_map(-1.25, -0.18)
    xmc = fixed_point_x_minus(pc.alpha, pc.sigma, pc.delta)
    assert max_lyapunov(State3(xmc + 0.001, xmc, xmc), pc, cfg) > 0.0


def test_close_returns_exact_period_two():
    # x' = y with everything else off: (p, q, z) has exact period two
    p = MapParams(alpha=0.0, sigma=-1.0, tau=0.0, a=0.0, b=0.0, c=0.0,
                  delta=0.0)
    events = close_returns(State3(1.0, 2.0, 1.0), p, 1e-8, 3)
    assert events == [(2, 0.0)]


def test_close_returns_zero_threshold_empty():
    events = close_returns(State3(-1.3387, -0.2563, -0.9553),
                           sc_map(-1.25, -0.18), 0.0, 500)
    assert events == []


def test_close_returns_distances_below_threshold():
    events = close_returns(State3(-1.3387, -0.2563, -0.9553),
                           sc_map(-1.25, -0.18), 0.005, 1500)
    assert len(events) >= 3
    for period, dist in events:
        assert 0.0 <= dist < 0.005
        assert period >= 1
    periods = [p for p, _ in events]
    assert periods == sorted(periods)


def test_symbols_from_orbit_basics():
    assert str(symbols_from_orbit([2.0, 0.5, 3.0], 0.5)) == "+++"
    assert (str(symbols_from_orbit([-1.0, 2.0], 1.0))
            == str(symbols_from_orbit([-1.0, 2.0], 0.01)))
    with pytest.raises(InvalidInput):
        symbols_from_orbit([1.0, 0.0], 1.0)
    with pytest.raises(InvalidInput):
        symbols_from_orbit([1.0], 0.0)


def test_symbols_of_chaotic_orbit_prefix():
    # first 23 signs of the attractor orbit: robust, well below the
    # decorrelation horizon of the chaotic dynamics
    p = sc_map(-1.25, -0.18)
    s = State3(-1.3387, -0.2563, -0.9553)
    xs = [s.x]
    from ailimit import map_forward
    for _ in range(22):
        s = map_forward(s, p)
        xs.append(s.x)
    eps = 1.0 / math.sqrt(1.25)
    expanded = str(SymbolSequence.parse("-+-+-+-+--" + "+-" * 6 + "+"))
    got = str(symbols_from_orbit(xs, eps))
    assert got == "-+-+-+-+---+-+-+-+-+-+-"
    assert len(got) == 23
    assert expanded[:1] == got[:1]


def test_attractor_scan_deterministic_across_threads():
    grid = ScanGrid(alpha_min=-1.5, alpha_max=-0.5, r_min=-0.2, r_max=0.0,
                    na=6, nr=4)
    cfg = sc_cfg(transient_T=800, lyap_steps=2000, lyap_discard=200)
    one = attractor_scan(grid, SC_PARAMS, cfg, threads=1)
    two = attractor_scan(grid, SC_PARAMS, cfg, threads=2)
    for i in range(grid.na):
        for j in range(grid.nr):
            assert one.cells[i][j] == two.cells[i][j]


def test_explicit_ic_reveals_second_attractor():
    # multiple attractors: a period-3 orbit is reached from an explicit
    # initial point while the fixed-point offset lands on period 1
    explicit = sc_cfg(explicit_ic=State3(0.0125839, 0.677585, -1.25765))
    cell = classify_cell(-1.1, 0.27, SC_PARAMS, explicit)
    assert (cell.classification, cell.period) == (OrbitClass.PERIODIC, 3)
    default = classify_cell(-1.1, 0.27, SC_PARAMS, sc_cfg())
    assert (default.classification, default.period) == (OrbitClass.PERIODIC, 1)


def test_scan_rejects_nonnegative_alpha():
    with pytest.raises(InvalidInput):
        classify_cell(0.5, 0.0, SC_PARAMS, sc_cfg())
    with pytest.raises(InvalidInput):
        ScanGrid(alpha_min=-1.0, alpha_max=0.5, r_min=0.0, r_max=1.0,
                 na=4, nr=4)
