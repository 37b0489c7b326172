import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from br2d import identities as idn
from br2d import kernel
from br2d.certificate import DELTA_C


def mp_cos_integral(q, l):
    return mp.quad(lambda t: mp.cos(l * t) / mp.sqrt(1 - q * mp.cos(t)),
                   [0, mp.pi, 2 * mp.pi])


# -- angular orthogonality --------------------------------------------------------

def test_orthogonality_off_diagonal_vanishes():
    r = idn.angular_orthogonality(0.5, 2, 3)
    assert abs(r.lhs) <= 1e-9
    assert r.passed


def test_orthogonality_diagonal_has_2pi_constant():
    r = idn.angular_orthogonality(0.5, 1, 1)
    assert abs(r.lhs.real / r.rhs - 1.0) <= 1e-8
    assert r.extra["ratio_to_4pi"] == pytest.approx(0.5, abs=1e-8)


def test_orthogonality_q09_against_elliptic_integral():
    # int_0^{2pi} dt / sqrt(1 - q cos t) = 4 K(m) / sqrt(1 + q), m = 2q / (1 + q)
    q = 0.9
    one_d = 4 * mp.ellipk(2 * q / (1 + q)) / mp.sqrt(1 + q)
    r = idn.angular_orthogonality(q, 0, 0)
    assert abs(r.lhs.real - float(2 * mp.pi * one_d)) <= 1e-7 * abs(r.lhs)
    assert abs(r.lhs.imag) <= 1e-9


@pytest.mark.parametrize("q", [0.3, 0.6, 0.9])
@pytest.mark.parametrize("l", [0, 1, 2])
@pytest.mark.parametrize("lp", [0, 1, 2])
def test_orthogonality_grid(q, l, lp):
    r = idn.angular_orthogonality(q, l, lp)
    assert r.passed
    if l == lp:
        assert r.rhs == pytest.approx(float(2 * mp.pi * mp_cos_integral(q, l)), rel=1e-12)
        assert r.extra["ratio_to_4pi"] == pytest.approx(0.5, abs=1e-8)
    else:
        assert abs(r.lhs) <= 1e-9


def test_orthogonality_rejects_bad_q():
    with pytest.raises(ValueError):
        idn.angular_orthogonality(1.0, 0, 0)


# -- sine vanishing ---------------------------------------------------------------

@pytest.mark.parametrize("q,l", [(0.3, 1), (0.99, 5), (0.5, 0)])
def test_sine_vanishing(q, l):
    r = idn.sine_vanishing(q, l)
    assert abs(r.lhs) <= 1e-10
    assert r.passed


# -- angular to Legendre ---------------------------------------------------------

@pytest.mark.parametrize("k,p,pp", [(0, 1.0, 2.0), (3, 0.5, 0.7), (1, 2.0, 1.0), (5, 1.0, 1.3)])
def test_angular_to_legendre(k, p, pp):
    r = idn.angular_to_legendre(k, p, pp)
    assert r.passed
    oracle = mp.quad(lambda t: mp.cos(k * t) / mp.sqrt(p * p + pp * pp - 2 * p * pp * mp.cos(t)),
                     [0, mp.pi, 2 * mp.pi])
    assert r.lhs == pytest.approx(float(oracle), rel=1e-11)


@settings(max_examples=20, deadline=None)
@given(k=st.integers(0, 4), p=st.floats(0.2, 3.0), ratio=st.floats(1.2, 3.0),
       lam=st.floats(0.1, 10.0))
def test_angular_to_legendre_homogeneity(k, p, ratio, lam):
    r1 = idn.angular_to_legendre(k, p, p * ratio)
    r2 = idn.angular_to_legendre(k, lam * p, lam * p * ratio)
    assert r1.passed and r2.passed
    assert r2.lhs * lam == pytest.approx(r1.lhs, rel=1e-9)
    assert r2.rhs * lam == pytest.approx(r1.rhs, rel=1e-9)


def test_angular_to_legendre_rejects_equal_momenta():
    with pytest.raises(ValueError):
        idn.angular_to_legendre(0, 1.0, 1.0)


def test_angular_channel_kernel_matches_kernel_module():
    for k in (0, 1, -1, 3):
        for r, rp in ((0.5, 1.5), (2.0, 0.3)):
            assert idn.angular_channel_kernel(k, r, rp) == pytest.approx(
                float(kernel.channel_kernel(k, r, rp)), rel=1e-9)


# -- Hankel transform -----------------------------------------------------------

def mp_hankel(k, a, p):
    # r = s^2 removes the endpoint singularity r^{a+1}
    return mp.quad(lambda s: 2 * mp.besselj(k, p * s * s) * s ** (2 * a + 3) * mp.exp(-s * s),
                   mp.linspace(0, 8, 81) + [mp.inf])


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("a", [-0.5, -1.5])
@pytest.mark.parametrize("p", [1e-6, 0.3, 1.0, 5.0])
def test_hankel_identity(k, a, p):
    r = idn.hankel_identity(k, a, p)
    assert r.passed
    assert r.rel_error <= 1e-10
    oracle = float(mp_hankel(k, a, p))
    assert r.lhs == pytest.approx(oracle, rel=1e-10, abs=1e-300)


def test_hankel_small_p_limit_is_gamma():
    r = idn.hankel_identity(0, -0.5, 1e-8)
    assert r.lhs == pytest.approx(math.gamma(1.5), rel=1e-12)
    assert r.rhs == pytest.approx(math.gamma(1.5), rel=1e-12)


def test_hankel_rejects_unsupported_parameters():
    with pytest.raises(ValueError):
        idn.hankel_identity(2, -0.5, 1.0)
    with pytest.raises(ValueError):
        idn.hankel_identity(0, -0.5, 0.0)


# -- partial-wave reconstruction ------------------------------------------------

def test_bump_profile_support():
    r = np.array([0.5, 1.0, 1.5, 2.0, 2.5])
    v = idn.bump_profile(r)
    assert v[0] == v[1] == v[3] == v[4] == 0.0
    assert v[2] == pytest.approx(1.0)


def test_reconstruction_without_coupling_is_kinetic():
    r = idn.partial_wave_reconstruction(0, delta=0.0)
    assert r.rel_error <= 1e-6
    assert r.passed


@pytest.mark.parametrize("k,delta", [(0, DELTA_C), (2, 0.2)])
def test_reconstruction_with_coupling(k, delta):
    r = idn.partial_wave_reconstruction(k, delta=delta)
    assert r.passed, r.rel_error
    assert r.extra["uncorrected_ratio"] == pytest.approx(2.0, abs=1e-3)


# -- suite ---------------------------------------------------------------------

def test_suite_passes_and_serialises():
    reports = idn.identity_suite()
    assert all(r.passed for r in reports), [r.name for r in reports if not r.passed]
    names = {r.name for r in reports}
    assert {"angular_orthogonality", "sine_vanishing", "angular_to_legendre",
            "hankel_identity", "q_recurrence", "partial_wave_reconstruction"} <= names
    text = json.dumps([r.to_dict() for r in reports])
    back = json.loads(text)
    assert len(back) == len(reports)
    assert all(d["pass"] for d in back)


def test_report_pass_matches_tolerance():
    r = idn.angular_orthogonality(0.6, 1, 1, tol=1e-30)
    assert r.passed == (r.rel_error <= r.tolerance)
    assert not r.passed
