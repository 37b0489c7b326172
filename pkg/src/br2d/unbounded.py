"""Unboundedness of b_0 above the critical coupling.

Trial functions f = chi_(a,b)(p) / p.  In the variables s = log p the
measure dp dp' / (p p') becomes ds ds' and Q_nu((p/p' + p'/p)/2) depends
only on w = |s - s'| through Q_nu(cosh w).  All window integrals below
are reduced to one-dimensional integrals in w that way, with the
log-singular point w = 0 at an endpoint.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernel, specfun
from .certificate import DELTA_C, G14
from .quadrature import gauss_legendre, integrate_adaptive

__all__ = [
    "TrialWindow",
    "DivergenceRow",
    "DivergenceResult",
    "i_nu_closed",
    "i_nu_constant",
    "i_nu_halves",
    "q_cosh",
    "lemma_monotonicity_check",
    "window_tail_bounds",
    "window_double_integral",
    "lemma_inequality_gap",
    "beta2_window_bound",
    "trial_form_value",
    "minimum_qualifying_a",
    "divergence_demo",
    "rows_to_csv",
    "lemma_suite",
]


def _degree_index(nu: float) -> int:
    if nu not in (-0.5, 0.5):
        raise ValueError("nu must be -1/2 or 1/2")
    return int(nu + 0.5)


@dataclass(frozen=True)
class TrialWindow:
    a: float
    b: float

    def __post_init__(self):
        if not (1.0 < self.a < self.b):
            raise ValueError("TrialWindow: need 1 < a < b")

    @property
    def log_ratio(self) -> float:
        return math.log(self.b / self.a)

    @property
    def norm_sq(self) -> float:
        return 1.0 / self.a - 1.0 / self.b


@dataclass
class DivergenceRow:
    a: float
    b: float
    delta: float
    form_value: float
    norm_sq: float
    log_ratio: float
    kinetic: float
    potential: float


@dataclass
class DivergenceResult:
    rows: list
    slope: float
    slope_bound: float
    strictly_decreasing: bool


def i_nu_closed(nu: float) -> float:
    """Gamma(1/4)^4 / (4 pi) for nu = -1/2 and 16 pi^3 / Gamma(1/4)^4 for nu = 1/2."""
    _degree_index(nu)
    g4 = G14 ** 4
    return g4 / (4.0 * math.pi) if nu < 0 else 16.0 * math.pi ** 3 / g4


def i_nu_halves(nu: float, tol: float = 1e-12):
    """(int_0^1, int_1^inf) of (1/p) Q_nu((p + 1/p)/2) dp, computed separately."""
    k = _degree_index(nu)

    def low(p):
        kp = np.sqrt((1.0 - p) * (1.0 + p))
        return specfun.legendre_q_half_ratio(k, p, kp) / p

    def high(p):
        r = 1.0 / p
        kp = np.sqrt((p - 1.0) * (p + 1.0)) / p
        return specfun.legendre_q_half_ratio(k, r, kp) / p

    left = integrate_adaptive(low, 0.0, 1.0, tol=0.0, rtol=tol)
    right = integrate_adaptive(high, 1.0, math.inf, tol=0.0, rtol=tol)
    return left.value, right.value


def i_nu_constant(nu: float, tol: float = 1e-12) -> float:
    """I_nu = int_0^inf (1/p) Q_nu((p + 1/p)/2) dp by adaptive quadrature."""
    left, right = i_nu_halves(nu, tol)
    return left + right


def q_cosh(k: int, w):
    """Q_{k-1/2}(cosh w) for w > 0."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    r = np.exp(-w)
    out = np.zeros_like(w)
    # below 1e-8 the log expansion is exact to O(w^2 log w); e^{-w} may round to 1
    tiny = w < 1e-8
    if np.any(tiny):
        out[tiny] = -np.log(0.5 * w[tiny]) + specfun.q_asymptotic_constant(k)
    # Q decays like e^{-(k+1/2) w}; it is 0 in double precision once r underflows
    live = (r > 0.0) & ~tiny
    if np.any(live):
        out[live] = specfun.legendre_q_half_ratio(k, r[live], np.sqrt(-np.expm1(-2.0 * w[live])))
    return out


def lemma_monotonicity_check(nu: float, alpha: float, n_points: int = 1000,
                             p_min: float = 1e-6) -> bool:
    """Whether p -> Q_nu((p + 1/p)/2) p^alpha increases on log-spaced samples of (0, 1).

    The lemma covers alpha >= -nu - 1; smaller alpha is allowed here so
    that violations outside that range can be observed.
    """
    k = _degree_index(nu)
    p = np.logspace(math.log10(p_min), math.log10(1.0 - 1e-9), n_points)
    g = specfun.legendre_q_half_ratio(k, p, np.sqrt((1.0 - p) * (1.0 + p))) * p ** alpha
    return bool(np.all(np.diff(g) > 0))


def _w_integral(fun, upper: float, tol: float) -> float:
    return integrate_adaptive(fun, 0.0, upper, tol=0.0, rtol=tol).value


def window_tail_bounds(window: TrialWindow, nu: float, tol: float = 1e-11):
    """Tail integrals int_a^b (1/p) int_0^a and int_a^b (1/p) int_b^inf of Q_nu/p'.

    Both reduce to int_0^inf min(w, L) Q_nu(cosh w) dw with L = log(b/a),
    split at w = L.
    """
    k = _degree_index(nu)
    L = window.log_ratio
    head = _w_integral(lambda w: w * q_cosh(k, w), L, tol)
    rest = integrate_adaptive(lambda w: L * q_cosh(k, w), L, math.inf, tol=0.0, rtol=tol).value
    low = head + rest
    # the upper tail is the mirror image s -> A + B - s of the lower one
    return low, low


def window_double_integral(window: TrialWindow, nu: float, tol: float = 1e-11) -> float:
    """int_a^b int_a^b Q_nu((p/p' + p'/p)/2) / (p p') dp' dp = 2 int_0^L (L - w) Q_nu(cosh w) dw."""
    k = _degree_index(nu)
    L = window.log_ratio
    return 2.0 * _w_integral(lambda w: (L - w) * q_cosh(k, w), L, tol)


def lemma_inequality_gap(window: TrialWindow, nu: float) -> float:
    """Window double integral minus (I_nu log(b/a) - 2 I_nu); nonnegative if the lemma holds."""
    inu = i_nu_closed(nu)
    return window_double_integral(window, nu) - (inu * window.log_ratio - 2.0 * inu)


def beta2_window_bound(window: TrialWindow):
    """(min of beta2 over the window square, 1/2 - 1/a).

    beta2 increases in both arguments, so the minimum sits at (a, a).
    """
    _, b2 = kernel.beta_weights(window.a, window.a)
    return float(b2), 0.5 - 1.0 / window.a


def _beta_center_integrals(w, A, B, panels, order=16):
    # int_{A+w/2}^{B-w/2} beta_i(e^{c+w/2}, e^{c-w/2}) dc for each w, i = 1, 2
    t, tw = gauss_legendre(order, 0.0, 1.0)
    edges = np.linspace(0.0, 1.0, panels + 1)
    lo = A + 0.5 * w
    span = (B - A) - w
    out1 = np.zeros_like(w)
    out2 = np.zeros_like(w)
    for e0, e1 in zip(edges[:-1], edges[1:]):
        u = e0 + (e1 - e0) * t
        c = lo[:, None] + span[:, None] * u[None, :]
        p = np.exp(c + 0.5 * w[:, None])
        q = np.exp(c - 0.5 * w[:, None])
        b1, b2 = kernel.beta_weights(p, q)
        wt = (e1 - e0) * tw
        out1 += span * (b1 @ wt)
        out2 += span * (b2 @ wt)
    return out1, out2


def trial_form_value(window: TrialWindow, delta: float, tol: float = 1e-10) -> DivergenceRow:
    """<f, b_0 f> for f = chi_(a,b)/p from the continuous form.

    kinetic   = int_a^b e(p) / p^2 dp,
    potential = (delta/pi) int int K_0(p, p') / (p p') dp dp'
              = (delta/pi) 2 int_0^L [Q_{-1/2}(cosh w) B_1(w) + Q_{1/2}(cosh w) B_2(w)] dw,
    where B_i(w) integrates beta_i along the anti-diagonal at log-distance w.
    """
    if delta < 0:
        raise ValueError("trial_form_value: delta must be >= 0")
    a, b = window.a, window.b
    kin = integrate_adaptive(lambda p: kernel.energy(p) / (p * p), a, b,
                             tol=0.0, rtol=tol).value
    A, B = math.log(a), math.log(b)
    L = B - A
    panels = max(1, int(math.ceil(L)))

    def outer(w):
        w = np.asarray(w, dtype=float)
        b1, b2 = _beta_center_integrals(w, A, B, panels)
        return q_cosh(0, w) * b1 + q_cosh(1, w) * b2

    pot = 0.0
    if delta > 0:
        pot = delta / math.pi * 2.0 * integrate_adaptive(outer, 0.0, L, tol=0.0, rtol=tol).value
    return DivergenceRow(a, b, float(delta), kin - pot, window.norm_sq, L, kin, pot)


def minimum_qualifying_a(delta: float) -> float:
    """Smallest a with 1 - (delta/delta_c)(1 - 2/a) < 0 (strictly: any larger a)."""
    if delta <= DELTA_C:
        raise ValueError(f"delta = {delta} <= delta_c = {DELTA_C:.10f}: no window qualifies")
    return 2.0 / (1.0 - DELTA_C / delta)


def divergence_demo(delta: float, a: float, b_list, tol: float = 1e-10) -> DivergenceResult:
    """Form values of chi_(a,b)/p for growing b at a fixed supercritical coupling."""
    a_min = minimum_qualifying_a(delta)
    if not a > a_min:
        raise ValueError(f"a = {a} does not qualify: need a > {a_min:.6g} "
                         f"so that 1 - (delta/delta_c)(1 - 2/a) < 0")
    bs = sorted(float(b) for b in b_list)
    rows = [trial_form_value(TrialWindow(a, b), delta, tol) for b in bs]
    vals = [r.form_value for r in rows]
    dec = all(v1 < v0 for v0, v1 in zip(vals, vals[1:]))
    if len(rows) >= 2:
        slope = float(np.polyfit([r.log_ratio for r in rows], vals, 1)[0])
    else:
        slope = math.nan
    bound = 1.0 - (delta / DELTA_C) * (1.0 - 2.0 / a)
    return DivergenceResult(rows, slope, bound, dec)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    fields = ["a", "b", "delta", "form_value", "norm_sq", "log_ratio"]
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore")
    writer.writeheader()
    for r in rows:
        writer.writerow(asdict(r))
    return buf.getvalue()


def lemma_suite(tol_scale: float = 1.0, n_windows: int = 20, seed: int = 0) -> list:
    """Checks of the constants I_nu and the window lemma, as plain dicts."""
    out = []
    rng = np.random.default_rng(seed)
    for nu in (-0.5, 0.5):
        left, right = i_nu_halves(nu)
        closed = i_nu_closed(nu)
        rel = abs(left + right - closed) / closed
        out.append({"name": "i_nu_constant", "nu": nu, "quadrature": left + right,
                    "closed_form": closed, "rel_error": rel,
                    "halves_difference": left - right,
                    "pass": bool(rel <= 1e-6 * tol_scale)})
        mono = lemma_monotonicity_check(nu, -0.5)
        out.append({"name": "lemma_monotonicity", "nu": nu, "alpha": -0.5, "pass": mono})
        tails = window_tail_bounds(TrialWindow(2.0, 4.0), nu)
        out.append({"name": "window_tail_bounds", "nu": nu, "a": 2.0, "b": 4.0,
                    "tails": list(tails), "I_nu": closed,
                    "pass": bool(max(tails) <= closed + 1e-8)})
        gaps = []
        for _ in range(n_windows):
            a = float(np.exp(rng.uniform(0.0, math.log(5e3))))
            b = float(np.exp(rng.uniform(math.log(a), math.log(1e4))))
            a = max(a, 1.0 + 1e-9)
            if not b > a:
                b = a * 1.5
            gaps.append(lemma_inequality_gap(TrialWindow(a, b), nu))
        out.append({"name": "lemma_inequality", "nu": nu, "windows": n_windows,
                    "min_gap": float(min(gaps)), "pass": bool(min(gaps) >= -1e-8 * tol_scale)})
    return out
