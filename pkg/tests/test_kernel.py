import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from br2d import kernel

mp.mp.dps = 30

momenta = st.floats(min_value=1e-4, max_value=1e5)


def mp_q(j, t):
    nu = mp.mpf(j) - mp.mpf(1) / 2
    pref = mp.sqrt(mp.pi) * mp.gamma(nu + 1) / (mp.gamma(nu + mp.mpf(3) / 2) * (2 * t) ** (nu + 1))
    return pref * mp.hyp2f1((nu + 2) / 2, (nu + 1) / 2, nu + mp.mpf(3) / 2, 1 / t ** 2)


def mp_kernel(k, p, q):
    p, q = mp.mpf(p), mp.mpf(q)
    t = (p / q + q / p) / 2
    ep, eq = mp.sqrt(p * p + 1), mp.sqrt(q * q + 1)
    b1 = mp.sqrt((1 + 1 / ep) * (1 + 1 / eq)) / 2
    b2 = mp.sqrt((1 - 1 / ep) * (1 - 1 / eq)) / 2
    j1, j2 = (k, k + 1) if k >= 0 else (-k, -k - 1)
    return b1 * mp_q(j1, t) + b2 * mp_q(j2, t)


def test_energy_values():
    assert kernel.energy(0.0) == 1.0
    assert kernel.energy(1.0) == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert kernel.energy(1e3) == pytest.approx(1000.0004999998750, abs=1e-9)


@given(st.floats(min_value=0.0, max_value=1e8))
def test_energy_dominates(p):
    assert kernel.energy(p) >= max(1.0, p)


def test_norm_factor():
    assert kernel.norm_factor(0.0) == pytest.approx(2.0)


@given(momenta, momenta)
def test_beta_forms_agree(p, q):
    b1, b2 = kernel.beta_weights(p, q)
    c1, c2 = kernel.beta_weights_quotient(p, q)
    assert b1 == pytest.approx(c1, rel=1e-12)
    assert b2 == pytest.approx(c2, rel=1e-12)
    assert 0 < b1 <= 1 and 0 <= b2 < 0.5
    s1, s2 = kernel.beta_weights(q, p)
    assert (s1, s2) == (b1, b2)


@given(st.floats(min_value=0.0, max_value=1e7))
def test_beta_sum_on_diagonal(p):
    b1, b2 = kernel.beta_weights(p, p)
    assert b1 + b2 == pytest.approx(1.0, abs=1e-15)


def test_beta_limits():
    b1, b2 = kernel.beta_weights(1e-9, 1e-9)
    assert b1 == pytest.approx(1.0, abs=1e-15) and b2 < 1e-15
    b1, b2 = kernel.beta_weights(1e6, 1e6)
    assert abs(b1 - 0.5) <= 1e-6 and abs(b2 - 0.5) <= 1e-6


def test_channel_degrees():
    assert kernel.channel_degrees(0) == (0, 1)
    assert kernel.channel_degrees(3) == (3, 4)
    assert kernel.channel_degrees(-1) == (1, 0)
    assert kernel.channel_degrees(-4) == (4, 3)


@pytest.mark.parametrize("k", [-5, -2, -1, 0, 1, 2, 7])
@pytest.mark.parametrize("p, q", [(1.0, 2.0), (0.01, 0.3), (5.0, 5.001), (1e-3, 1e3), (100.0, 37.0)])
def test_channel_kernel_matches_mpmath(k, p, q):
    assert kernel.channel_kernel(k, p, q) == pytest.approx(float(mp_kernel(k, p, q)), rel=1e-11)


@settings(max_examples=200)
@given(st.integers(min_value=-10, max_value=10), momenta, momenta)
def test_channel_kernel_symmetric_and_positive(k, p, q):
    if p == q:
        return
    a = kernel.channel_kernel(k, p, q)
    b = kernel.channel_kernel(k, q, p)
    assert a > 0
    assert abs(a - b) <= 1e-14 * a


def test_channel_kernel_vectorised():
    p = np.array([0.5, 1.0, 3.0])
    q = np.array([1.0, 2.0, 0.1])
    vec = kernel.channel_kernel(2, p, q)
    assert vec.shape == (3,)
    for i in range(3):
        assert vec[i] == kernel.channel_kernel(2, p[i], q[i])


def test_channel_kernel_errors():
    with pytest.raises(ValueError):
        kernel.channel_kernel(0, 1.0, 1.0)
    with pytest.raises(ValueError):
        kernel.channel_kernel(0, -1.0, 1.0)
    with pytest.raises(ValueError):
        kernel.channel_kernel(0, 0.0, 1.0)


def test_dominance_on_grid():
    g = np.logspace(-2, 3, 20)
    P, Q = np.meshgrid(g, g, indexing="ij")
    for k in range(-10, 11):
        if k != 0:
            assert kernel.dominance_gap(k, P.ravel(), Q.ravel()) <= 0.0


def test_diagonal_log_slope():
    p = 1.7
    eps = np.array([1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    vals = np.array([kernel.channel_kernel(0, p, p * (1 + e)) for e in eps])
    slope = np.polyfit(np.log(eps), vals, 1)[0]
    # beta1 + beta2 = 1 on the diagonal
    assert slope == pytest.approx(-1.0, rel=0.1)


@pytest.mark.parametrize("k", [-3, 0, 2])
@pytest.mark.parametrize("p", [0.05, 1.0, 40.0])
def test_diagonal_remainder_is_limit(k, p):
    h = 1e-7 * p
    approx = kernel.channel_kernel(k, p, p + h) + math.log(h)
    assert approx == pytest.approx(float(kernel.diagonal_remainder(k, p)), abs=1e-5)


def test_full_kernel_conjugate_symmetry():
    a, b = (1.0, 0.0), (0.0, 1.0)
    assert kernel.full_kernel(a, b) == kernel.full_kernel(b, a).conjugate()


@given(st.floats(0.1, 10), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_full_kernel_hermitian(r, x1, y1, phi):
    a = (x1, y1)
    b = (r * math.cos(phi), r * math.sin(phi))
    if math.hypot(a[0] - b[0], a[1] - b[1]) < 1e-6:
        return
    kab = kernel.full_kernel(a, b)
    kba = kernel.full_kernel(b, a)
    assert abs(kab - kba.conjugate()) <= 1e-14 * abs(kab)


def test_full_kernel_real_part_even_in_angle():
    r = 1.3
    b = (r, 0.0)
    for th in (0.2, 1.0, 2.5):
        up = kernel.full_kernel((r * math.cos(th), r * math.sin(th)), b)
        dn = kernel.full_kernel((r * math.cos(th), -r * math.sin(th)), b)
        assert up.real == pytest.approx(dn.real, rel=1e-14)


def test_full_kernel_singular():
    with pytest.raises(ValueError):
        kernel.full_kernel((1.0, 1.0), (1.0, 1.0))


def test_reflection_probe_reports_swap():
    g = np.logspace(-1, 2, 7)
    P, Q = np.meshgrid(g, g * 1.37, indexing="ij")
    for k in (0, 1, 4):
        rep = kernel.reflection_probe(k, P.ravel(), Q.ravel())
        # K_{-k-1} uses the same two Q's with the beta weights exchanged
        assert rep["swapped_rel_diff"] <= 1e-15
        assert rep["plain_rel_diff"] > 0
