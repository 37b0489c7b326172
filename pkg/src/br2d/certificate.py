"""Checkable steps of the positivity proof for the critical coupling.

Everything here is floating-point verification.  Sign claims on
cancellation-prone polynomials come with a condition estimate, and the
b_n coefficients can be recomputed with compensated summation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel, specfun

__all__ = [
    "CriticalCoupling",
    "CertificateReport",
    "critical_coupling",
    "scaling_reduction_check",
    "trial_h",
    "i_k_closed",
    "i_k_quadrature",
    "energy_bound",
    "energy_bound_from_ik",
    "f_of_x",
    "f_minimum",
    "SERIES_IDS",
    "series_coefficients",
    "series_value",
    "series_monotonicity_check",
    "low_regime_series_bounds",
    "high_regime_series_bounds",
    "hypergeometric_tail_check",
    "high_regime_coefficients",
    "certify_high_regime",
    "low_regime_coefficients",
    "certify_low_regime",
    "high_regime_pre",
    "high_regime_post",
    "low_regime_pre",
    "low_regime_post",
    "rational_reduction_check",
    "check_low_regime_series_bounds",
    "certificate_suite",
]

G14 = float(specfun.gamma(0.25))


@dataclass(frozen=True)
class CriticalCoupling:
    delta_c: float
    gamma_quarter: float

    @property
    def floor(self) -> float:
        """1 - 2 delta_c, the lower bound of b_0 at delta_c."""
        return 1.0 - 2.0 * self.delta_c


@dataclass
class CertificateReport:
    name: str
    coefficients: list
    sign_pattern: list
    min_value: float
    domain: tuple
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "coefficients": [float(c) for c in self.coefficients],
            "signs": list(self.sign_pattern),
            "min_value": float(self.min_value),
            "domain": list(self.domain),
            "pass": bool(self.passed),
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_plain)


def _plain(obj):
    # numpy scalars and arrays inside details
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def critical_coupling() -> CriticalCoupling:
    g4 = G14 ** 4
    s = g4 / (8.0 * math.pi ** 2) + 8.0 * math.pi ** 2 / g4
    return CriticalCoupling(1.0 / s, G14)


DELTA_C = critical_coupling().delta_c


def _signs(values):
    return ["+" if v > 0 else "-" if v < 0 else "0" for v in values]


# -- scaling reduction ---------------------------------------------------------

def scaling_reduction_check(delta: float, potential: np.ndarray, kinetic: np.ndarray,
                            n_vectors: int = 100, seed: int = 0) -> float:
    """Max relative violation of the convex-combination identity.

    For g in the symmetrised grid variables,
    g^T M_delta g = (1 - delta/delta_c) g^T diag(e) g + (delta/delta_c) g^T M_{delta_c} g.
    Both sides are evaluated independently from (potential, kinetic).
    """
    if delta > DELTA_C:
        raise ValueError("scaling_reduction_check: need delta <= delta_c")
    rng = np.random.default_rng(seed)
    n = len(kinetic)
    Md = np.diag(kinetic) - (delta / math.pi) * potential
    Mc = np.diag(kinetic) - (DELTA_C / math.pi) * potential
    worst = 0.0
    for _ in range(n_vectors):
        g = rng.standard_normal(n)
        g /= np.linalg.norm(g)
        lhs = g @ Md @ g
        kin = g @ (kinetic * g)
        rhs = (1.0 - delta / DELTA_C) * kin + (delta / DELTA_C) * (g @ Mc @ g)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return float(worst)


# -- trial functions and the two-way computation of I_k ---------------------------

def _check_k(k):
    if k not in (0, 1):
        raise ValueError("only k in {0, 1} is used")


def _one_minus_inv_e(p, e):
    # 1 - 1/e(p) without cancellation at small p
    return p * p / (e * (e + 1.0))


def trial_h(k: int, p):
    """h_k(p) = sqrt(p) (p^2+1)^(-3/4) Gamma(k+3/2) P^{-k}_{1/2}((p^2+1)^(-1/2))."""
    _check_k(k)
    p = np.asarray(p, dtype=float)
    e = kernel.energy(p)
    return (np.sqrt(p) * e ** -1.5 * specfun.gamma(k + 1.5)
            * specfun.legendre_p(-k, 0.5, 1.0 / e, one_minus_x=_one_minus_inv_e(p, e)))


def i_k_closed(k: int, p):
    """I_k(p) = pi sqrt(p) (p^2+1)^(-1/4) Gamma(k+1/2) P^{-k}_{-1/2}((p^2+1)^(-1/2))."""
    _check_k(k)
    p = np.asarray(p, dtype=float)
    e = kernel.energy(p)
    return (math.pi * np.sqrt(p) * e ** -0.5 * specfun.gamma(k + 0.5)
            * specfun.legendre_p(-k, -0.5, 1.0 / e, one_minus_x=_one_minus_inv_e(p, e)))


def i_k_quadrature(k: int, p: float, tol: float = 1e-12) -> float:
    """I_k(p) = int_0^inf h_k(p') Q_{k-1/2}((p/p' + p'/p)/2) dp', split at p' = p."""
    from .quadrature import integrate_adaptive

    _check_k(k)
    p = float(p)

    def integrand(q):
        lo = np.minimum(q, p)
        hi = np.maximum(q, p)
        kp = np.sqrt((hi - lo) * (hi + lo)) / hi
        return trial_h(k, q) * specfun.legendre_q_half_ratio(k, lo / hi, kp)

    left = integrate_adaptive(integrand, 0.0, p, tol=0.0, rtol=tol)
    right = integrate_adaptive(integrand, p, math.inf, tol=0.0, rtol=tol)
    return left.value + right.value


def energy_bound_from_ik(p: float, delta: float = DELTA_C) -> float:
    """E(p) = e - delta/(2 pi) ((1+1/e) I_0/h_0 + (1-1/e) I_1/h_1), p > 0."""
    e = float(kernel.energy(p))
    r0 = i_k_closed(0, p) / trial_h(0, p)
    r1 = i_k_closed(1, p) / trial_h(1, p)
    return e - delta / (2.0 * math.pi) * ((1.0 + 1.0 / e) * r0 + (1.0 - 1.0 / e) * r1)


def energy_bound(p, delta: float = DELTA_C):
    """E(p) = e - delta ((e+1) P_{-1/2}/P_{1/2} + (e-1)/3 P^{-1}_{-1/2}/P^{-1}_{1/2}) at 1/e.

    The second ratio is 0/0 at p = 0 where its coefficient vanishes; the
    term is dropped there.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(p < 0):
        raise ValueError("energy_bound: p must be >= 0")
    e = kernel.energy(p)
    x = 1.0 / e
    r0 = specfun.legendre_p(0, -0.5, x) / specfun.legendre_p(0, 0.5, x)
    out = e - delta * (e + 1.0) * r0
    pos = p > 0
    if np.any(pos):
        xp = x[pos]
        r1 = specfun.legendre_p(-1, -0.5, xp) / specfun.legendre_p(-1, 0.5, xp)
        # e - 1 = p^2 / (e + 1) without cancellation
        out[pos] -= delta * (p[pos] ** 2 / (e[pos] + 1.0)) / 3.0 * r1
    return float(out[0]) if out.size == 1 else out


# -- the function f(x) --------------------------------------------------------------

def f_of_x(x, representation: str = "legendre", delta: float = DELTA_C):
    """f(x) = 1/x - delta ((1/x+1) R_0(x) + (1/x-1)/3 R_1(x)), x in (0, 1].

    ``legendre``: R_0 = P_{-1/2}/P_{1/2}, R_1 = P^{-1}_{-1/2}/P^{-1}_{1/2}.
    ``hypergeometric``: the same ratios as quotients of 2F1 at (1-x)/2.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xa <= 0) | (xa > 1)):
        raise ValueError("f_of_x: x must lie in (0, 1]")
    if representation == "legendre":
        r0 = specfun.legendre_p(0, -0.5, xa) / specfun.legendre_p(0, 0.5, xa)
    elif representation == "hypergeometric":
        z = (1.0 - xa) / 2.0
        r0 = specfun.hyp2f1(0.5, 0.5, 1.0, z) / specfun.hyp2f1(-0.5, 1.5, 1.0, z)
    else:
        raise ValueError(f"unknown representation {representation!r}")
    out = 1.0 / xa - delta * (1.0 / xa + 1.0) * r0
    inner = xa < 1.0
    if np.any(inner):
        xi = xa[inner]
        if representation == "legendre":
            r1 = specfun.legendre_p(-1, -0.5, xi) / specfun.legendre_p(-1, 0.5, xi)
        else:
            z = (1.0 - xi) / 2.0
            r1 = specfun.hyp2f1(0.5, 0.5, 2.0, z) / specfun.hyp2f1(-0.5, 1.5, 2.0, z)
        out[inner] -= delta * (1.0 / xi - 1.0) / 3.0 * r1
    return float(out[0]) if np.isscalar(x) or np.ndim(x) == 0 else out


def _golden(fun, a, b, tol=1e-12):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    xm = 0.5 * (a + b)
    return xm, fun(xm)


def f_minimum(n_points: int = 10_000, delta: float = DELTA_C):
    """Minimum of f on (0, 1] by a dense grid scan and golden-section refinement.

    Returns (x_min, f_min, grid_values) with the grid x_i = i/n, i = 1..n.
    """
    xs = np.arange(1, n_points + 1) / n_points
    vals = f_of_x(xs, delta=delta)
    i = int(np.argmin(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, n_points - 1)]
    xm, fm = _golden(lambda t: f_of_x(t, delta=delta), lo, hi)
    if vals[i] <= fm:
        xm, fm = float(xs[i]), float(vals[i])
    return xm, fm, vals


# -- power series at x = 0 ---------------------------------------------------------

# even terms s_e Gamma(al+k) Gamma(be+k) / (Gamma(1/2+k) k!),
# odd terms  s_o Gamma(ga+k) Gamma(et+k) / (Gamma(3/2+k) k!); prefactor 1/(2 pi)
# for mu = 0 and 1/(4 pi) for sqrt(1-x^2) P^{-1}.
_SERIES = {
    "P_-1/2": ((1, 0.25, 0.25), (-1, 0.75, 0.75), 2.0),
    "P_1/2": ((-1, 0.75, -0.25), (1, 0.25, 1.25), 2.0),
    "P^-1_-1/2": ((1, -0.25, -0.25), (-1, 0.25, 0.25), 4.0),
    "P^-1_1/2": ((-1, 0.25, -0.75), (1, 0.75, -0.25), 4.0),
}
SERIES_IDS = tuple(_SERIES)
_SERIES_DEGREE = {"P_-1/2": (0, -0.5), "P_1/2": (0, 0.5),
                  "P^-1_-1/2": (-1, -0.5), "P^-1_1/2": (-1, 0.5)}


def _gamma_any(x: float) -> float:
    # Gamma on (-1, inf) minus 0; only the k = 0 terms need x < 0
    if x < 0:
        return float(specfun.gamma(x + 1.0)) / x
    return float(specfun.gamma(x))


def _half_series(sign, al, be, base, n_terms):
    c = sign * _gamma_any(al) * _gamma_any(be) / _gamma_any(base)
    out = [c]
    for k in range(n_terms - 1):
        c *= (al + k) * (be + k) / ((base + k) * (k + 1))
        out.append(c)
    return out


def series_coefficients(series_id: str, n_coeffs: int) -> np.ndarray:
    """a_0 .. a_{n_coeffs-1} of the series at 0 (prefactor not included)."""
    even, odd, _ = _SERIES[series_id]
    half = (n_coeffs + 1) // 2
    ev = _half_series(even[0], even[1], even[2], 0.5, half)
    od = _half_series(odd[0], odd[1], odd[2], 1.5, half)
    a = np.empty(2 * half)
    a[0::2] = ev
    a[1::2] = od
    return a[:n_coeffs]


def series_value(series_id: str, x: float, n_coeffs: int = 400) -> float:
    """Sum of the series at x in [0, 1), returning the Ferrers function itself."""
    a = series_coefficients(series_id, n_coeffs)
    pref = 1.0 / (_SERIES[series_id][2] * math.pi)
    s = pref * math.fsum(a * x ** np.arange(n_coeffs))
    if series_id.startswith("P^-1"):
        s /= math.sqrt(1.0 - x * x)
    return s


def series_monotonicity_check(series_id: str, k_max: int = 50) -> CertificateReport:
    """Sign alternation from a_2 on and the ratio bounds for 1 <= k <= k_max."""
    if k_max < 3:
        raise ValueError("k_max must be >= 3")
    a = series_coefficients(series_id, 2 * k_max + 3)
    alt = all(a[n] * a[n + 1] < 0 for n in range(2, len(a) - 1))
    slack_even = []
    slack_odd = []
    for k in range(1, k_max + 1):
        slack_even.append(abs(a[2 * k] / a[2 * k + 1]) - (k + 0.5) / (k + 0.25))
        slack_odd.append(abs(a[2 * k + 1] / a[2 * k + 2]) - (k + 1.0) / (k + 0.75))
    min_slack = min(min(slack_even), min(slack_odd))
    return CertificateReport(
        name=f"series_monotonicity[{series_id}]",
        coefficients=list(a[:6]),
        sign_pattern=_signs(a[:6]),
        min_value=min_slack,
        domain=(1, k_max),
        passed=bool(alt and min_slack >= 0.0),
        details={"alternating_from_a2": alt,
                 "min_even_ratio_slack": min(slack_even),
                 "min_odd_ratio_slack": min(slack_odd)},
    )


def low_regime_series_bounds(x):
    """Quadratic truncations of the four series used on (0, 0.4].

    Returns a dict series_id -> (bound, kind) where kind is 'upper' or
    'lower'.  The P^{-1} bounds are for sqrt(1-x^2) P^{-1}.
    """
    x = np.asarray(x, dtype=float)
    out = {}
    for sid, kind in (("P_-1/2", "upper"), ("P_1/2", "lower"),
                      ("P^-1_-1/2", "upper"), ("P^-1_1/2", "lower")):
        a = series_coefficients(sid, 3)
        pref = 1.0 / (_SERIES[sid][2] * math.pi)
        out[sid] = (pref * (a[0] + a[1] * x + a[2] * x * x), kind)
    return out


def _reference_value(sid, x):
    mu, nu = _SERIES_DEGREE[sid]
    v = specfun.legendre_p(mu, nu, x)
    if mu == -1:
        v = np.sqrt(1.0 - x * x) * v
    return v


def check_low_regime_series_bounds(n_points: int = 2000) -> CertificateReport:
    """Each truncation bounds its function on (0, 0.4] and is positive there."""
    xs = np.linspace(0.4 / n_points, 0.4, n_points)
    bounds = low_regime_series_bounds(xs)
    margins = {}
    positive = True
    for sid, (b, kind) in bounds.items():
        ref = _reference_value(sid, xs)
        margin = (b - ref) if kind == "upper" else (ref - b)
        margins[sid] = float(np.min(margin))
        positive &= bool(np.all(b > 0))
    worst = min(margins.values())
    return CertificateReport("low_regime_series_bounds", [], [], worst, (0.0, 0.4),
                             bool(worst >= -1e-13 and positive),
                             {"margins": margins, "rhs_positive": positive})


def _hyp_coeffs(nu, mu, n):
    # coefficients of F(-nu, nu+1; 1-mu; y/2) in powers of y = 1 - x
    c = [1.0]
    for k in range(n - 1):
        c.append(c[-1] * (-nu + k) * (nu + 1 + k) / ((1 - mu + k) * (k + 1) * 2.0))
    return np.array(c)


def high_regime_series_bounds(x):
    """Quadratic truncations in y = 1 - x with the tail bound |c_2| y^2.

    Returns dict (mu, nu) -> (bound, kind) for the 2F1 factors: upper
    bounds for nu = -1/2 (all terms positive) and lower bounds for
    nu = 1/2 (all terms after the first negative).
    """
    y = 1.0 - np.asarray(x, dtype=float)
    out = {}
    for mu in (0, -1):
        for nu in (-0.5, 0.5):
            c = _hyp_coeffs(nu, mu, 3)
            if nu < 0:
                out[(mu, nu)] = (c[0] + c[1] * y + 2.0 * c[2] * y * y, "upper")
            else:
                out[(mu, nu)] = (c[0] + c[1] * y - 2.0 * abs(c[2]) * y * y, "lower")
    return out


def hypergeometric_tail_check(xs=(0.4, 0.5, 0.7, 0.9), n_terms: int = 200) -> CertificateReport:
    """|sum_{k>=3} c_k y^k| <= 2 |c_3| y^3 <= |c_2| y^2 against an n_terms tail."""
    worst = math.inf
    rows = []
    ok = True
    for mu in (0, -1):
        for nu in (-0.5, 0.5):
            c = _hyp_coeffs(nu, mu, n_terms)
            for x in xs:
                y = 1.0 - x
                tail = abs(math.fsum(c[3:] * y ** np.arange(3, n_terms)))
                b3 = 2.0 * abs(c[3]) * y ** 3
                b2 = abs(c[2]) * y ** 2
                good = tail <= b3 <= b2
                ok &= good
                worst = min(worst, b3 - tail)
                rows.append({"mu": mu, "nu": nu, "x": x, "tail": tail,
                             "bound3": b3, "bound2": b2, "ok": good})
    return CertificateReport("hypergeometric_tail", [], [], worst, (min(xs), max(xs)),
                             bool(ok), {"rows": rows})


# -- regime x >= 0.4 -----------------------------------------------------------------

def high_regime_coefficients(delta: float = DELTA_C) -> np.ndarray:
    """Numerator coefficients of (1-x)^1 .. (1-x)^5 in the reduced bound."""
    return np.array([
        49152.0 - 114688.0 * delta,
        -27648.0 + 48128.0 * delta,
        -4224.0 + 16128.0 * delta,
        1800.0 - 3504.0 * delta,
        225.0 - 540.0 * delta,
    ])


def high_regime_pre(x, delta: float = DELTA_C):
    """Lower bound for f(x) - (1 - 2 delta) from the truncated 2F1 quotients.

    delta multiplies both quotient terms, as in the definition of f.
    """
    x = np.asarray(x, dtype=float)
    y = 1.0 - x
    q0 = (1 + y / 8 + 9 * y * y / 128) / (1 - 3 * y / 8 - 15 * y * y / 128)
    q1 = (1 + y / 16 + 3 * y * y / 128) / (1 - 3 * y / 16 - 5 * y * y / 128)
    return 1 / x - delta * ((1 / x + 1) * q0 + (1 / x - 1) / 3 * q1) - (1 - 2 * delta)


def high_regime_post(x, delta: float = DELTA_C):
    """The same bound as a single rational function of y = 1 - x."""
    x = np.asarray(x, dtype=float)
    y = 1.0 - x
    c = high_regime_coefficients(delta)
    num = y * (c[0] + y * (c[1] + y * (c[2] + y * (c[3] + y * c[4]))))
    den = 3 * x * (128 - 48 * y - 15 * y * y) * (128 - 24 * y - 5 * y * y)
    return num / den


def certify_high_regime(n_points: int = 6001, delta: float = DELTA_C) -> CertificateReport:
    c = high_regime_coefficients(delta)
    signs_ok = bool(c[2] > 0 and c[3] > 0 and c[4] > 0)
    # linear in (1-x): check both ends of [0.4, 1]
    lin = [c[0] + c[1] * (1.0 - x) for x in (0.4, 1.0)]
    lin_ok = min(lin) >= 0.0
    xs = np.linspace(0.4, 1.0, n_points)
    y = 1.0 - xs
    den = 3 * xs * (128 - 48 * y - 15 * y * y) * (128 - 24 * y - 5 * y * y)
    den_ok = bool(np.all(den > 0))
    bound = high_regime_post(xs, delta)
    gap = f_of_x(xs, delta=delta) - (1.0 - 2.0 * delta)
    dominance = float(np.min(gap - bound))
    series_ok = True
    bounds = high_regime_series_bounds(xs)
    z = (1.0 - xs) / 2.0
    for (mu, nu), (b, kind) in bounds.items():
        ref = specfun.hyp2f1(-nu, nu + 1.0, 1.0 - mu, z)
        m = (b - ref) if kind == "upper" else (ref - b)
        series_ok &= bool(np.min(m) >= -1e-13)
    passed = signs_ok and lin_ok and den_ok and dominance >= -1e-12 \
        and float(np.min(bound)) >= -1e-15 and series_ok
    return CertificateReport(
        name="high_regime",
        coefficients=list(c),
        sign_pattern=_signs(c),
        min_value=float(np.min(bound)),
        domain=(0.4, 1.0),
        passed=bool(passed),
        details={"linear_condition": {"x=0.4": lin[0], "x=1": lin[1]},
                 "stated_positive_coefficients": signs_ok,
                 "denominator_positive": den_ok,
                 "min_f_gap_minus_bound": dominance,
                 "truncated_series_bounds_hold": series_ok},
    )


# -- regime x <= 0.4 -------------------------------------------------------------------

def _low_terms(g: float, pi: float):
    g4, g8, g12, g16 = g ** 4, g ** 8, g ** 12, g ** 16
    p2, p4, p6, p8 = pi ** 2, pi ** 4, pi ** 6, pi ** 8
    return [
        [8 * g16, -256 * g12 * p2, 3072 * g8 * p4, -98304 * p8],
        [-8 * g16, 3072 * g8 * p4, -40960 * g4 * p6, 98304 * p8],
        [-3 * g16, 192 * g12 * p2, -2944 * g8 * p4, 4096 * g4 * p6, 36864 * p8],
        [3 * g16, -24 * g12 * p2, -128 * g8 * p4, 10752 * g4 * p6, -36864 * p8],
        [-12 * g12 * p2, 288 * g8 * p4, -1536 * g4 * p6],
    ]


def low_regime_coefficients(compensated: bool = True):
    """(b_0 .. b_4, condition estimates sum|terms| / |b_n|)."""
    terms = _low_terms(G14, math.pi)
    b = np.array([math.fsum(t) if compensated else sum(t) for t in terms])
    cond = np.array([sum(abs(v) for v in t) / abs(bn) for t, bn in zip(terms, b)])
    return b, cond


def _low_factors(x):
    g4 = G14 ** 4
    p2 = math.pi ** 2
    return (g4 * g4 + 64 * p2 * p2,
            8 * g4 - 96 * p2 * x - 3 * g4 * x * x,
            16 * p2 + g4 * x - 6 * p2 * x * x)


def low_regime_pre(x, delta: float = DELTA_C):
    """Lower bound for f(x) - (1 - 2 delta) from the quadratic series truncations."""
    x = np.asarray(x, dtype=float)
    g4 = G14 ** 4
    p2 = math.pi ** 2
    q0 = (g4 - 4 * p2 * x + g4 * x * x / 8) / (8 * p2 + g4 * x / 2 - 3 * p2 * x * x)
    q1 = (8 * p2 - g4 * x / 2 + p2 * x * x) / (g4 - 12 * p2 * x - 3 * g4 * x * x / 8)
    return 1 / x - delta * ((1 / x + 1) * q0 + (1 / x - 1) * q1) - (1 - 2 * delta)


def low_regime_post(x):
    """The same bound as sum b_n x^n over the three denominator factors."""
    x = np.asarray(x, dtype=float)
    b, _ = low_regime_coefficients()
    num = b[0] + x * (b[1] + x * (b[2] + x * (b[3] + x * b[4])))
    d0, d1, d2 = _low_factors(x)
    return num / (d0 * d1 * d2)


def certify_low_regime(n_points: int = 100_001, compensated: bool = True) -> CertificateReport:
    b, cond = low_regime_coefficients(compensated)
    signs = _signs(b)
    pattern_ok = signs == ["+", "-", "-", "+", "-"]
    xs = np.linspace(0.0, 0.4, n_points)
    quartic = np.polynomial.polynomial.polyval(xs, b)
    scan_min = float(np.min(quartic))
    # exact minimum over [0, 0.4]: endpoints and real critical points inside
    crit = np.roots(np.polyder(b[::-1]))
    cand = [0.0, 0.4] + [float(r.real) for r in crit
                         if abs(r.imag) < 1e-12 and 0.0 < r.real < 0.4]
    exact_min = float(min(np.polynomial.polynomial.polyval(c, b) for c in cand))
    d0, d1, d2 = _low_factors(xs)
    den_ok = bool(d0 > 0 and np.all(d1 > 0) and np.all(d2 > 0))
    printed = b[0] - b[1] * 0.4 - b[2] * 0.4 ** 2 - b[4] * 0.4 ** 4
    corrected = b[0] + b[1] * 0.4 + b[2] * 0.4 ** 2 + b[4] * 0.4 ** 4
    passed = pattern_ok and den_ok and scan_min > 0 and exact_min > 0 and corrected > 0
    return CertificateReport(
        name="low_regime",
        coefficients=list(b),
        sign_pattern=signs,
        min_value=min(scan_min, exact_min),
        domain=(0.0, 0.4),
        passed=bool(passed),
        details={"condition_estimates": list(map(float, cond)),
                 "compensated": compensated,
                 "scan_min": scan_min,
                 "critical_point_min": exact_min,
                 "denominator_positive": den_ok,
                 "printed_bound": float(printed),
                 "printed_bound_is_lower_bound_at_0": bool(printed <= b[0]),
                 "corrected_bound": float(corrected)},
    )


def rational_reduction_check(x_samples, regime: str, rtol: float = 1e-9) -> CertificateReport:
    """Pre- and post-reduction forms of a regime bound agree at the samples."""
    xs = np.asarray(list(x_samples), dtype=float)
    if regime == "high":
        if np.any((xs < 0.4) | (xs > 1)):
            raise ValueError("high regime samples must lie in [0.4, 1]")
        pre, post = high_regime_pre(xs), high_regime_post(xs)
        dom = (0.4, 1.0)
    elif regime == "low":
        if np.any((xs <= 0) | (xs > 0.4)):
            raise ValueError("low regime samples must lie in (0, 0.4]")
        pre, post = low_regime_pre(xs), low_regime_post(xs)
        dom = (0.0, 0.4)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    scale = np.maximum(np.abs(post), 1e-300)
    rel = np.abs(pre - post) / scale
    return CertificateReport(
        name=f"rational_reduction[{regime}]",
        coefficients=[],
        sign_pattern=[],
        min_value=float(np.min(post)),
        domain=dom,
        passed=bool(np.all(rel <= rtol)),
        details={"x": xs.tolist(), "pre": pre.tolist(), "post": post.tolist(),
                 "max_rel_diff": float(np.max(rel))},
    )


# -- aggregated suite --------------------------------------------------------------

def _critical_report(tol_scale):
    cc = critical_coupling()
    g4 = cc.gamma_quarter ** 4
    consistency = 1.0 / cc.delta_c - (g4 / (8 * math.pi ** 2) + 8 * math.pi ** 2 / g4)
    ok = abs(cc.delta_c - 0.378) <= 5e-4 and abs(consistency) <= 1e-12 * tol_scale
    return CertificateReport("critical_coupling", [cc.delta_c, cc.floor], [], cc.floor,
                             (), bool(ok), {"consistency_residual": consistency})


def _f_report(tol_scale):
    floor = critical_coupling().floor
    xm, fm, vals = f_minimum()
    at_one = f_of_x(1.0) - floor
    agree = max(abs(f_of_x(x) - f_of_x(x, "hypergeometric")) for x in (0.05, 0.4, 0.9))
    gap = float(np.min(vals) - floor)
    tol = 1e-10 * tol_scale
    ok = gap >= -tol and abs(at_one) <= tol and agree <= tol and xm == 1.0
    return CertificateReport("f_minimum", [], [], gap, (0.0, 1.0), bool(ok),
                             {"x_min": xm, "f_min": fm, "f(1)-floor": at_one,
                              "representation_disagreement": agree})


def _energy_report(tol_scale):
    floor = critical_coupling().floor
    ps = np.concatenate(([0.0], np.logspace(-6, 6, 1201)))
    eb = energy_bound(ps)
    gap = float(np.min(eb) - floor)
    pos = ps > 0
    fx = f_of_x(1.0 / kernel.energy(ps[pos]))
    # both sides cancel terms of size e(p); compare relative to that scale
    mismatch = float(np.max(np.abs(eb[pos] - fx) / kernel.energy(ps[pos])))
    ok = gap >= -1e-9 * tol_scale and mismatch <= 1e-10 * tol_scale
    return CertificateReport("energy_bound", [], [], gap, (0.0, 1e6), bool(ok),
                             {"argmin_p": float(ps[int(np.argmin(eb))]),
                              "max_scaled_mismatch_with_f": mismatch})


def _ik_report(tol_scale):
    rows = []
    worst = 0.0
    for k in (0, 1):
        for p in (0.1, 1.0, 10.0):
            closed = float(i_k_closed(k, p))
            quad = i_k_quadrature(k, p)
            rel = abs(quad - closed) / abs(closed)
            worst = max(worst, rel)
            rows.append({"k": k, "p": p, "closed": closed, "quadrature": quad, "rel": rel})
    return CertificateReport("i_k_two_way", [], [], worst, (0.1, 10.0),
                             bool(worst <= 1e-6 * tol_scale), {"rows": rows})


def certificate_suite(tol_scale: float = 1.0) -> list:
    """All positivity-proof checks; ``tol_scale`` multiplies the tolerances."""
    out = [_critical_report(tol_scale)]
    out += [series_monotonicity_check(sid, 50) for sid in SERIES_IDS]
    out.append(check_low_regime_series_bounds())
    out.append(hypergeometric_tail_check())
    out.append(certify_high_regime())
    out.append(certify_low_regime())
    out.append(rational_reduction_check([0.4, 0.55, 0.7, 0.85, 0.95], "high", 1e-9 * tol_scale))
    out.append(rational_reduction_check([0.05, 0.1, 0.2, 0.3, 0.4], "low", 1e-9 * tol_scale))
    out.append(_f_report(tol_scale))
    out.append(_energy_report(tol_scale))
    out.append(_ik_report(tol_scale))
    return out
