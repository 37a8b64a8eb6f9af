import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxcov.covariance import PairConfig
from darbouxcov.dressing import (
    DegenerateRoots,
    ExpSum,
    Field2D,
    GridTooSmall,
    InconsistentConfig,
    ZeroCrossing,
    characteristic_roots,
    chain_start,
    dress_once,
    evaluate_on_grid,
    first_integral_variants,
    make_seed,
    pde_residual,
    run_chain,
    stencil_derivative,
    telescoping_residual,
    wronskian,
)
from darbouxcov.diffring import d_x, jet

CFG = PairConfig(b3=1, a2=-1, a1=0, alpha=-0.21, beta=0)


def test_characteristic_roots_solve_cubic():
    r = characteristic_roots(CFG, 0.02)
    assert np.allclose(r, [0.5, -0.1, -0.4])
    assert np.allclose(r**3 - 0.21 * r - 0.02, 0)


def test_degenerate_roots_rejected():
    # k^3 - 3k + 2 = (k - 1)^2 (k + 2)
    cfg = PairConfig(b3=1, a2=-1, a1=0, alpha=-3, beta=0)
    with pytest.raises(DegenerateRoots):
        make_seed(cfg, -2.0, [1, 1])


def test_seed_solves_the_linear_pair():
    seed = make_seed(CFG, 0.02, [1, 1], select=[0, 2])
    x, t = np.linspace(-2, 2, 7), 0.3
    phi = seed.evaluate(x, t)
    L = seed.evaluate(x, t, 3) - 0.21 * seed.evaluate(x, t, 1)
    A = -seed.evaluate(x, t, 2)
    assert np.allclose(L, 0.02 * phi)
    assert np.allclose(seed.evaluate(x, t, 0, 1), A)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-1, 1))
def test_log_derivatives_match_direct_ratios(x, t):
    e = ExpSum([1.0, 2.0, 0.5], [0.3, -0.7, 1.1], [0.2, -0.4, 0.1])
    f = lambda i, j: (e.coef * e.k**i * e.omega**j * np.exp(e.k * x + e.omega * t)).sum().real
    d = e.log_derivatives(np.array([x]), np.array([t]), [(1, 0), (2, 0), (1, 1)])
    f0, fx, fxx, ft, fxt = f(0, 0), f(1, 0), f(2, 0), f(0, 1), f(1, 1)
    assert np.isclose(d[1, 0][0], fx / f0)
    assert np.isclose(d[2, 0][0], fxx / f0 - (fx / f0) ** 2)
    assert np.isclose(d[1, 1][0], fxt / f0 - fx * ft / f0**2)


def test_moments_do_not_overflow():
    e = ExpSum([1.0, 1.0], [1.0, -1.0], [0.0, 0.0])
    d = e.log_derivatives(np.array([800.0, -800.0]), np.zeros(2), [(1, 0)])
    assert np.allclose(d[1, 0], [1.0, -1.0])


def test_zero_crossing_detected():
    e = ExpSum([1.0, -1.0], [1.0, -1.0], [0.0, 0.0])  # 2 sinh x
    with pytest.raises(ZeroCrossing) as info:
        e.log_derivatives(np.linspace(-1, 1, 11), np.zeros(11), [(1, 0)])
    assert abs(info.value.x) < 0.2


def test_wronskian_of_two_exponentials():
    e1 = ExpSum([1.0], [0.5], [0.0])
    e2 = ExpSum([2.0], [-0.3], [0.0])
    W = wronskian([e1, e2])
    assert np.allclose(W.coef, [2.0 * (-0.8)]) and np.allclose(W.k, [0.2])


def test_stencil_fourth_order():
    errs = []
    for n in (41, 81):
        x = np.linspace(0, 1, n)
        d = stencil_derivative(np.sin(x), x[1] - x[0], 2, accuracy=4)
        errs.append(np.nanmax(np.abs(d + np.sin(x))))
    assert 3.5 < np.log2(errs[0] / errs[1]) < 4.5
    assert np.isnan(d[0]) and np.isnan(d[-1])


def test_evaluate_on_grid_crops_and_rejects_tiny():
    g = Field2D.grid((0, 1), (0, 1), 21, 11)
    X, _ = g.mesh()
    w = g.with_values(X**2)
    out = evaluate_on_grid(d_x(jet("w"), 2), {"w": w})
    assert np.allclose(out.values, 2)
    with pytest.raises(GridTooSmall):
        evaluate_on_grid(d_x(jet("w"), 4), {"w": Field2D.grid((0, 1), (0, 1), 5, 5)})


def test_dressed_field_residual_small_and_printed_large():
    seed = make_seed(CFG, 0.02, [1, 1], select=[0, 2])
    g = Field2D.grid((-10, 10), (0, 1), 200, 200)
    w = dress_once(seed, CFG, g)
    err, _ = pde_residual(w, CFG)
    assert err < 1e-5
    bad, _ = pde_residual(w, CFG, "printed")
    assert bad > 1e-2


def test_pde_residual_negative_control():
    g = Field2D.grid((-10, 10), (0, 1), 100, 100)
    X, T = g.mesh()
    w = g.with_values(np.exp(-(X**2)) * (1 + T))
    err, _ = pde_residual(w, CFG)
    assert err > 1e-2


def test_chain_needs_plain_config():
    with pytest.raises(InconsistentConfig):
        chain_start([make_seed(CFG, 0.02, [1, 1], [0, 2])], CFG.with_(beta=1), Field2D.grid((0, 1), (0, 1), 9, 9))


def test_short_chain_relations():
    seeds = [
        make_seed(CFG, -0.03, [1, 1], [0, 1]),
        make_seed(CFG, -0.015, [1, -1], [0, 2]),
        make_seed(CFG, 0.015, [1, -1], [0, 2]),
    ]
    g = Field2D.grid((-10, 10), (0, 1), 160, 160)
    states = run_chain(seeds, CFG, g, 2)
    for s in states[1:]:
        assert s.records["two_step_derived"] < 1e-5
        assert s.records["two_step_printed"] > 1e-3
        assert s.records["u_update"] < 1e-5
    assert telescoping_residual(states) < 1e-5
    fi = first_integral_variants(states[2], CFG)
    assert fi["derived"]["spread"] < 1e-10
    assert np.isclose(fi["derived"]["value"], 0.015)
    assert fi["plus"]["spread"] > 1e-3
