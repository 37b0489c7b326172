import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sint

from br2d import kernel
from br2d.quadrature import (QuadratureError, build_radial_grid, cell_pair_integral,
                             diagonal_cell_weight, gauss_legendre, integrate_adaptive,
                             log_square_integral, neighbour_cell_weight)


# -- radial grids -------------------------------------------------------------

@pytest.mark.parametrize("map_kind", ["rational", "exponential"])
def test_grid_structure(map_kind):
    g = build_radial_grid(64, map_kind, 1e4)
    assert g.n == 64
    assert np.all(np.diff(g.nodes) > 0)
    assert np.all(g.weights > 0)
    assert np.all(g.nodes > 0)
    assert np.all(np.diff(g.edges) > 0)
    assert g.edges[0] == pytest.approx(0.0, abs=1e-300)
    assert np.all((g.edges[:-1] < g.nodes) & (g.nodes < g.edges[1:]))


@pytest.mark.parametrize("map_kind", ["rational", "exponential"])
def test_grid_exponential_moment(map_kind):
    g = build_radial_grid(64, map_kind, 1e4)
    assert np.sum(g.weights * np.exp(-g.nodes)) == pytest.approx(1.0, abs=1e-8)


def test_grid_gaussian_moment():
    g = build_radial_grid(64, "rational", 1e4)
    assert np.sum(g.weights * g.nodes * np.exp(-g.nodes ** 2)) == pytest.approx(0.5, abs=1e-8)


def test_grid_graded_near_zero():
    g = build_radial_grid(64, "rational", 1e4)
    val = np.sum(g.weights * g.nodes ** -0.5 * np.exp(-g.nodes))
    assert val == pytest.approx(math.sqrt(math.pi), abs=1e-6)


def test_grid_algebraic_tail():
    # the rational map resolves 1/(1+p)^2 up to the truncation point
    g = build_radial_grid(200, "rational", 1e4)
    val = np.sum(g.weights / (1 + g.nodes) ** 2)
    assert val == pytest.approx(1.0 - 1.0 / (1.0 + 1e4), rel=1e-8)


def test_grid_refinement_reduces_error():
    errs = []
    for n in (16, 32, 64):
        g = build_radial_grid(n, "rational", 1e4)
        errs.append(abs(np.sum(g.weights * g.nodes ** -0.5 * np.exp(-g.nodes)) - math.sqrt(math.pi)))
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("kwargs", [dict(n=4), dict(n=32, map_kind="cubic"),
                                    dict(n=32, p_max=0.5), dict(n=32.5)])
def test_grid_rejects_bad_config(kwargs):
    with pytest.raises(ValueError):
        build_radial_grid(**kwargs)


def test_gauss_legendre_interval():
    x, w = gauss_legendre(10, 2.0, 5.0)
    assert np.sum(w) == pytest.approx(3.0)
    assert np.sum(w * x ** 19) == pytest.approx((5.0 ** 20 - 2.0 ** 20) / 20, rel=1e-13)


# -- adaptive integration ---------------------------------------------------------

def test_adaptive_log_endpoint():
    assert integrate_adaptive(lambda x: -np.log(x), 0.0, 1.0, tol=1e-12).value == pytest.approx(1.0, abs=1e-10)


def test_adaptive_inverse_sqrt_endpoint():
    assert integrate_adaptive(lambda x: x ** -0.5, 0.0, 1.0, tol=1e-12).value == pytest.approx(2.0, abs=1e-10)


def test_adaptive_elliptic_oracle():
    res = integrate_adaptive(lambda t: 1 / np.sqrt(1 - 0.9 * np.cos(t)), 0.0, 2 * math.pi, tol=1e-12)
    ref = 4 / math.sqrt(1.9) * float(mp.ellipk(1.8 / 1.9))
    assert res.value == pytest.approx(ref, abs=1e-9)


def test_adaptive_semi_infinite():
    res = integrate_adaptive(lambda x: x ** -1.5, 1.0, math.inf, tol=0.0, rtol=1e-12)
    assert res.value == pytest.approx(2.0, rel=1e-10)
    res = integrate_adaptive(lambda x: np.exp(-x), 0.0, math.inf, tol=1e-13)
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_adaptive_interior_breakpoint():
    res = integrate_adaptive(lambda x: np.log(np.abs(x - 0.3)), 0.0, 1.0, tol=1e-12, points=(0.3,))
    ref = 0.7 * math.log(0.7) - 0.7 + 0.3 * math.log(0.3) - 0.3
    assert res.value == pytest.approx(ref, abs=1e-10)


CORPUS = [
    (lambda x: -np.log(x), 0.0, 1.0, 1.0),
    (lambda x: x ** -0.5, 0.0, 1.0, 2.0),
    (lambda x: np.sqrt(x), 0.0, 1.0, 2.0 / 3.0),
    (lambda x: np.cos(10 * x), 0.0, 3.0, math.sin(30.0) / 10.0),
    (lambda x: 1 / (1 + x * x), 0.0, 20.0, math.atan(20.0)),
    (lambda x: x ** -0.9, 0.0, 1.0, 10.0),
]


@pytest.mark.parametrize("item", range(len(CORPUS)))
def test_adaptive_error_estimate_bounds_true_error(item):
    f, a, b, exact = CORPUS[item]
    for tol in (1e-6, 1e-9):
        res = integrate_adaptive(f, a, b, tol=tol)
        assert abs(res.value - exact) <= max(tol, res.error_estimate)
        tight = integrate_adaptive(f, a, b, tol=tol / 10)
        assert abs(res.value - tight.value) <= res.error_estimate + tol / 10
        assert res.error_estimate >= 0
        assert res.evaluations > 0


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=-0.9, max_value=3.0))
def test_adaptive_power_property(alpha):
    res = integrate_adaptive(lambda x: x ** alpha, 0.0, 1.0, tol=1e-10)
    assert res.value == pytest.approx(1 / (alpha + 1), abs=max(1e-10, res.error_estimate) + 1e-12)


def test_adaptive_fails_loudly():
    with pytest.raises(QuadratureError):
        integrate_adaptive(lambda x: 1 / x, 0.0, 1.0, tol=1e-8, max_intervals=200)
    with pytest.raises(ValueError):
        integrate_adaptive(lambda x: x, 1.0, 0.0)


# -- singular cells ---------------------------------------------------------------

def test_log_square_integral_against_scipy():
    a, b, c, d = 0.2, 0.7, 0.5, 1.3
    ref, _ = sint.dblquad(lambda q, p: math.log(abs(p - q)) if p != q else 0.0,
                          a, b, c, d, epsabs=1e-12)
    assert log_square_integral(a, b, c, d) == pytest.approx(ref, abs=1e-8)


def _graded_rule(lo, hi, levels=45, order=20):
    # Gauss-Legendre on geometric panels accumulating at lo
    x, w = gauss_legendre(order, 0.0, 1.0)
    cuts = np.concatenate(([0.0], 2.0 ** -np.arange(levels, -1, -1)))
    xs = np.concatenate([c0 + (c1 - c0) * x for c0, c1 in zip(cuts[:-1], cuts[1:])])
    ws = np.concatenate([(c1 - c0) * w for c0, c1 in zip(cuts[:-1], cuts[1:])])
    return lo + (hi - lo) * xs, (hi - lo) * ws


def _brute_cell(k, lo, hi):
    # fold the square onto the triangle q < p; no singularity subtraction,
    # the log endpoint is resolved by grading towards q = p and p = lo
    ps, pw = _graded_rule(lo, hi)
    total = 0.0
    for p, w in zip(ps, pw):
        v, vw = _graded_rule(0.0, 1.0)
        q = p - (p - lo) * v
        keep = q < p
        total += w * (p - lo) * np.dot(vw[keep], kernel.channel_kernel(k, p, q[keep]))
    return 2.0 * total


@pytest.mark.parametrize("k", [0, 2, -1])
def test_cell_pair_integral_against_brute_force(k):
    val = cell_pair_integral((0.9, 1.1), (0.9, 1.1), k)
    assert val == pytest.approx(_brute_cell(k, 0.9, 1.1), rel=1e-4)


def test_neighbour_cells_against_brute_force():
    # tensor rule graded towards the shared corner p = q = 1
    ps, pw = _graded_rule(0.0, 0.1, levels=30)
    qs, qw = _graded_rule(0.0, 0.2, levels=30)
    P, Q = np.meshgrid(1.0 - ps, 1.0 + qs, indexing="ij")
    K = kernel.channel_kernel(0, P, Q)
    ref = float(pw @ K @ qw)
    val = cell_pair_integral((0.9, 1.0), (1.0, 1.2), 0)
    assert val == pytest.approx(ref, rel=1e-6)


def test_cell_weight_log_scaling():
    # mean over an h x h cell is -log h + 3/2 + R(p, p) + O(h)
    p = 2.0
    R = float(kernel.diagonal_remainder(0, p))
    for h in (1e-2, 1e-3, 1e-4):
        mean = cell_pair_integral((p, p + h), (p, p + h), 0) / h ** 2
        assert mean == pytest.approx(-math.log(h) + 1.5 + R, abs=5 * h)


def test_cell_weight_dominance_and_positivity():
    g = build_radial_grid(64, "rational", 1e4)
    for i in (0, 10, 31, 63):
        w0 = diagonal_cell_weight(g, i, 0)
        w5 = diagonal_cell_weight(g, i, 5)
        assert np.isfinite(w0) and w0 > w5 > 0
    for i in (0, 31, 62):
        assert neighbour_cell_weight(g, i, 0) > 0
    with pytest.raises(IndexError):
        diagonal_cell_weight(g, 64, 0)
    with pytest.raises(IndexError):
        neighbour_cell_weight(g, 63, 0)
