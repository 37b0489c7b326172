"""Numerical checks of the identities behind the partial-wave reduction.

Each check returns an :class:`IdentityReport` holding both sides of the
identity computed along independent routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel, specfun
from .quadrature import gauss_legendre, integrate_adaptive

__all__ = [
    "IdentityReport",
    "angular_orthogonality",
    "sine_vanishing",
    "angular_to_legendre",
    "angular_channel_kernel",
    "hankel_identity",
    "bump_profile",
    "partial_wave_reconstruction",
    "identity_suite",
]


@dataclass
class IdentityReport:
    name: str
    parameters: dict
    lhs: complex | float
    rhs: complex | float
    rel_error: float
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def num(z):
            z = complex(z)
            return z.real if z.imag == 0 else [z.real, z.imag]
        return {"name": self.name, "parameters": self.parameters,
                "lhs": num(self.lhs), "rhs": num(self.rhs),
                "rel_error": self.rel_error, "tolerance": self.tolerance,
                "pass": self.passed, **self.extra}


def _report(name, params, lhs, rhs, tol, absolute=False, **extra):
    diff = abs(lhs - rhs)
    err = diff if absolute or rhs == 0 else diff / abs(rhs)
    return IdentityReport(name, params, lhs, rhs, float(err), tol, bool(err <= tol), extra)


# -- angular integrals --------------------------------------------------------

def _cos_integral(q: float, l: int) -> float:
    res = integrate_adaptive(lambda t: np.cos(l * t) / np.sqrt(1.0 - q * np.cos(t)),
                             0.0, 2.0 * math.pi, tol=1e-14, rtol=1e-15)
    return res.value


def angular_orthogonality(q: float, l: int, l_prime: int, n_theta: int = 256,
                          tol: float = 1e-8) -> IdentityReport:
    """Double angular integral of e^{il t} e^{-il' t'} / sqrt(1 - q cos(t - t')).

    lhs: tensor trapezoid rule on [0, 2pi)^2 (spectrally accurate for the
    periodic analytic integrand).  rhs: 2 pi delta_{l,l'} times a 1D
    adaptive integral.  The report also carries lhs over the 4 pi
    variant of the rhs.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("angular_orthogonality: need 0 < q < 1")
    t = 2.0 * math.pi * np.arange(n_theta) / n_theta
    h = 2.0 * math.pi / n_theta
    T, Tp = np.meshgrid(t, t, indexing="ij")
    vals = np.exp(1j * (l * T - l_prime * Tp)) / np.sqrt(1.0 - q * np.cos(T - Tp))
    lhs = complex(np.sum(vals) * h * h)
    if l == l_prime:
        rhs = 2.0 * math.pi * _cos_integral(q, l)
        ratio4 = lhs.real / (2.0 * rhs)
        return _report("angular_orthogonality", {"q": q, "l": l, "l_prime": l_prime},
                       lhs, rhs, tol, ratio_to_4pi=ratio4)
    return _report("angular_orthogonality", {"q": q, "l": l, "l_prime": l_prime},
                   lhs, 0.0, max(tol, 1e-9), absolute=True, ratio_to_4pi=None)


def sine_vanishing(q: float, l: int, tol: float = 1e-10) -> IdentityReport:
    """int_0^{2pi} sin(l t) / sqrt(1 - q cos t) dt = 0."""
    if not 0.0 < q < 1.0:
        raise ValueError("sine_vanishing: need 0 < q < 1")
    res = integrate_adaptive(lambda t: np.sin(l * t) / np.sqrt(1.0 - q * np.cos(t)),
                             0.0, 2.0 * math.pi, tol=1e-14)
    return _report("sine_vanishing", {"q": q, "l": l}, res.value, 0.0, tol, absolute=True)


def angular_to_legendre(k: int, p: float, p_prime: float, tol: float = 1e-8) -> IdentityReport:
    """int_0^{2pi} e^{ik phi} / |p - p' e^{i phi}| dphi = 2/sqrt(p p') Q_{|k|-1/2}(t)."""
    if p == p_prime or p <= 0 or p_prime <= 0:
        raise ValueError("angular_to_legendre: need distinct positive momenta")

    def f(phi):
        return np.cos(k * phi) / np.sqrt(p * p + p_prime * p_prime - 2 * p * p_prime * np.cos(phi))

    lhs = integrate_adaptive(f, 0.0, 2.0 * math.pi, tol=0.0, rtol=1e-13).value
    t = 0.5 * (p / p_prime + p_prime / p)
    rhs = 2.0 / math.sqrt(p * p_prime) * specfun.legendre_q_half(abs(k), t)
    return _report("angular_to_legendre", {"k": k, "p": p, "p_prime": p_prime}, lhs, rhs, tol)


def _full_kernel_polar(r, rp, phi):
    # K(r e^{i phi}, rp), vectorised over phi
    z = r * np.exp(1j * phi)
    e, ep = kernel.energy(r), kernel.energy(rp)
    num = (e + 1.0) * (ep + 1.0) + z * rp
    return num / (kernel.norm_factor(r) * kernel.norm_factor(rp) * np.abs(z - rp))


def angular_channel_kernel(k: int, r: float, rp: float) -> float:
    """K_k(r, r') from the two-dimensional kernel: 1/2 sqrt(r r') int e^{ik phi} K dphi."""
    if r == rp:
        raise ValueError("angular_channel_kernel: singular at r = r'")
    res = integrate_adaptive(lambda phi: np.real(np.exp(1j * k * phi) * _full_kernel_polar(r, rp, phi)),
                             0.0, 2.0 * math.pi, tol=0.0, rtol=1e-13)
    return 0.5 * math.sqrt(r * rp) * res.value


# -- Hankel transform -----------------------------------------------------------

def hankel_identity(k: int, a: float, p: float, tol: float = 1e-5,
                    rel_target: float = 1e-13) -> IdentityReport:
    """int_0^inf J_k(p r) r^{a+1} e^{-r} dr against its closed form.

    The integral is summed panel by panel (panel length min(pi/p, 2),
    about half a Bessel period) until a certified bound on the remaining
    tail, int_R^inf r^{a+1} e^{-r} dr with |J_k| <= 1, falls below
    rel_target times the running sum.
    """
    if k not in (0, 1) or a not in (-0.5, -1.5):
        raise ValueError("hankel_identity: k in {0, 1}, a in {-1/2, -3/2}")
    if not (k + a + 2 > 0 and p > 0):
        raise ValueError("hankel_identity: need k + a + 2 > 0 and p > 0")
    m = a + 1.0

    def f(r):
        return specfun.bessel_j(k, p * np.asarray(r)) * np.asarray(r) ** m * np.exp(-r)

    step = min(math.pi / p, 2.0)
    parts = []
    lo = 0.0
    panels = 0
    while True:
        hi = lo + step
        parts.append(integrate_adaptive(f, lo, hi, tol=1e-16, rtol=1e-14).value)
        panels += 1
        lo = hi
        # int_R^inf r^m e^{-r} dr <= R^m e^{-R} / (1 - max(m, 0)/R), valid for R > m
        if lo <= 2.0 * max(m, 0.0):
            continue
        tail = lo ** m * math.exp(-lo) / (1.0 - max(m, 0.0) / lo)
        total = math.fsum(parts)
        if tail <= rel_target * abs(total) or panels > 10_000:
            break
    lhs = total
    e = float(kernel.energy(p))
    # 1 - 1/e = p^2 / (e (e + 1)) keeps P^{-1} accurate as p -> 0
    rhs = (e ** -(a + 2.0) * specfun.gamma(k + a + 2.0)
           * specfun.legendre_p(-k, a + 1.0, 1.0 / e, one_minus_x=p * p / (e * (e + 1.0))))
    return _report("hankel_identity", {"k": k, "a": a, "p": p}, lhs, float(rhs), tol,
                   tail_bound=tail, panels=panels)


# -- full partial-wave reconstruction ---------------------------------------------

def bump_profile(r, lo: float = 1.0, hi: float = 2.0):
    """Smooth bump supported on [lo, hi], equal to 1 at the midpoint."""
    r = np.asarray(r, dtype=float)
    s = (2.0 * r - (lo + hi)) / (hi - lo)
    out = np.zeros_like(r)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def _potential_channel(k, profile, lo, hi, kern, n_outer=64):
    # int int a(r) a(r') kern(r, r') dr dr' with the diagonal as a breakpoint
    xs, ws = gauss_legendre(n_outer, lo, hi)
    total = 0.0
    for x, w in zip(xs, ws):
        def inner(r, x=x):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            off = r != x
            out[off] = profile(r[off]) * kern(k, r[off], np.full(np.count_nonzero(off), x))
            return out
        val = integrate_adaptive(inner, lo, hi, tol=1e-11, points=(x,)).value
        total += w * float(profile(x)) * val
    return total


def _potential_two_dim(k, profile, lo, hi, n_outer=48, n_rho=48, n_psi=128):
    """int int u(p) conj(u(p')) K(p, p') dp dp' for u = (2pi)^{-1/2} r^{-1/2} a(r) e^{ik theta}.

    Rotation invariance fixes p' = (r', 0) at the cost of a factor 2 pi.
    The inner p-integral uses polar coordinates centred at p', so the
    1/|p - p'| singularity cancels against the area element; along each
    ray the annulus lo <= |p| <= hi is integrated piece by piece.
    """
    xs, ws = gauss_legendre(n_outer, lo, hi)
    psi = 2.0 * math.pi * np.arange(n_psi) / n_psi
    hpsi = 2.0 * math.pi / n_psi
    g, gw = gauss_legendre(n_rho, 0.0, 1.0)
    c, s = np.cos(psi), np.sin(psi)
    total = 0.0 + 0.0j
    for rp, wp in zip(xs, ws):
        # ray p = rp + rho e^{i psi}: |p|^2 = rp^2 + 2 rp rho cos + rho^2
        disc_hi = np.sqrt(hi * hi - (rp * s) ** 2)
        rho_out = -rp * c + disc_hi
        inner_disc = lo * lo - (rp * s) ** 2
        crosses = (inner_disc > 0) & (c < 0)
        root = np.sqrt(np.where(crosses, inner_disc, 0.0))
        rho_a = np.where(crosses, -rp * c - root, rho_out)
        rho_b = np.where(crosses, -rp * c + root, rho_out)
        acc = np.zeros(n_psi, dtype=complex)
        for a0, a1 in ((np.zeros(n_psi), rho_a), (rho_b, rho_out)):
            length = a1 - a0
            rho = a0[:, None] + length[:, None] * g[None, :]
            z = rp + rho * np.exp(1j * psi)[:, None]
            rr = np.abs(z)
            u = profile(rr) / np.sqrt(2.0 * math.pi * rr) * np.exp(1j * k * np.angle(z))
            e, ep = kernel.energy(rr), kernel.energy(rp)
            num = (e + 1.0) * (ep + 1.0) + z * rp
            # K times the polar area element rho: the 1/|p - p'| = 1/rho cancels
            kr = num / (kernel.norm_factor(rr) * kernel.norm_factor(rp))
            acc += length * ((u * kr) @ gw)
        inner = np.sum(acc) * hpsi
        up = float(profile(rp)) / math.sqrt(2.0 * math.pi * rp)
        total += wp * rp * up * inner
    return 2.0 * math.pi * total


def partial_wave_reconstruction(k: int, profile=bump_profile, delta: float = 0.0,
                                support=(1.0, 2.0), tol: float = 1e-3) -> IdentityReport:
    """Two-dimensional form of a single-channel u against the channel form.

    lhs = int E |u|^2 dp - delta/(2 pi) int int u conj(u') K dp dp'  (2D quadrature),
    rhs = int e |a|^2 dr - delta/pi int int a a' K_k dr dr'         (1D channel form).
    Also reports the potential-term ratio obtained with the doubled
    channel kernel 2 K_k against the two-dimensional potential.
    """
    lo, hi = support
    # kinetic parts: 2D tensor rule (radial Gauss x angular trapezoid) versus 1D adaptive
    xr, wr = gauss_legendre(96, lo, hi)
    n_ang = 16
    ang = 2.0 * math.pi * np.arange(n_ang) / n_ang
    U = (profile(xr)[:, None] / np.sqrt(2.0 * math.pi * xr)[:, None]
         * np.exp(1j * k * ang)[None, :])
    kin2d = float(np.sum(wr[:, None] * xr[:, None] * kernel.energy(xr)[:, None]
                         * np.abs(U) ** 2) * (2.0 * math.pi / n_ang))
    kin1d = integrate_adaptive(lambda r: kernel.energy(r) * profile(r) ** 2, lo, hi,
                               tol=1e-14).value
    pot2d = 0.0
    pot1d = 0.0
    ratio = None
    if delta > 0:
        pot2d = _potential_two_dim(k, profile, lo, hi).real
        pot1d = _potential_channel(k, profile, lo, hi, kernel.channel_kernel)
        # potential terms: (delta/pi) int int a a' (2 K_k) over (delta/2pi) pot2d
        ratio = 4.0 * pot1d / pot2d
    lhs = kin2d - delta / (2.0 * math.pi) * pot2d
    rhs = kin1d - delta / math.pi * pot1d
    tol_used = tol if delta > 0 else min(tol, 1e-6)
    return _report("partial_wave_reconstruction", {"k": k, "delta": delta,
                                                   "support": list(support)},
                   lhs, rhs, tol_used,
                   kinetic_2d=kin2d, kinetic_1d=kin1d,
                   potential_2d=delta / (2.0 * math.pi) * pot2d,
                   potential_1d=delta / math.pi * pot1d,
                   uncorrected_ratio=ratio)


# -- default suite ---------------------------------------------------------------

def identity_suite(tol_scale: float = 1.0) -> list:
    """The default identity checks; ``tol_scale`` multiplies every tolerance."""
    from .certificate import DELTA_C

    out = []
    for q in (0.3, 0.6, 0.9):
        for l in (0, 1, 2):
            for lp in (0, 1, 2):
                out.append(angular_orthogonality(q, l, lp, tol=1e-8 * tol_scale))
    for q, l in ((0.3, 1), (0.99, 5), (0.5, 0)):
        out.append(sine_vanishing(q, l, tol=1e-10 * tol_scale))
    for k, p, pp in ((0, 1.0, 2.0), (3, 0.5, 0.7), (1, 2.0, 1.0)):
        out.append(angular_to_legendre(k, p, pp, tol=1e-8 * tol_scale))
    for k in (0, 1):
        for a in (-0.5, -1.5):
            for p in (0.3, 1.0, 5.0):
                out.append(hankel_identity(k, a, p, tol=1e-5 * tol_scale))
    res = specfun.q_recurrence_residual(k_max=10)
    out.append(_report("q_recurrence", {"k_max": 10, "t_range": [1.001, 1e3]},
                       res, 0.0, 1e-9 * tol_scale, absolute=True))
    for k, d in ((0, DELTA_C), (2, 0.2), (0, 0.0)):
        out.append(partial_wave_reconstruction(k, delta=d, tol=1e-3 * tol_scale))
    return out
