"""Special functions used throughout the package.

Only the parameter ranges needed by the two-dimensional Brown-Ravenhall
analysis are supported: Gamma and digamma on the positive axis, the
Gauss series 2F1 for |x| <= 1/2, Ferrers functions P^mu_nu with
mu in {0, -1} on (0, 1], Legendre Q of half-integer degree on (1, inf),
Bessel J_k and complete elliptic integrals (the latter mostly as
internal building blocks and cross-check oracles).

All functions accept scalars or numpy arrays where that makes sense and
return a Python float for scalar input.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "gamma",
    "digamma",
    "pochhammer",
    "Hyp2F1Params",
    "SeriesResult",
    "hyp2f1",
    "hyp2f1_series",
    "legendre_p",
    "legendre_q_half",
    "legendre_q_half_ratio",
    "legendre_q_half_integral",
    "q_asymptotic_constant",
    "q_recurrence_residual",
    "bessel_j",
    "elliptic_k",
    "elliptic_e",
]

EULER_GAMMA = 0.57721566490153286060651209008240243

# Godfrey's 15-term Lanczos coefficients, g = 607/128.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _scalar_or_array(values, was_scalar):
    if was_scalar:
        return float(values.reshape(-1)[0])
    return values


def _lanczos(x):
    # valid for x >= 0.5
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS_C[0])
    for i in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so large arguments do not overflow before exp(-t)
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_2PI * half * (half * np.exp(-t)) * acc


def gamma(x):
    """Gamma function for real x > 0 (Lanczos approximation)."""
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xa > 0)):
        raise ValueError("gamma: argument must be > 0")
    out = np.empty_like(xa)
    small = xa < 0.5
    big = ~small
    out[big] = _lanczos(xa[big])
    if np.any(small):
        xs = xa[small]
        out[small] = _lanczos(xs + 1.0) / xs
    return _scalar_or_array(out, scalar)


def digamma(x):
    """psi(x) = Gamma'(x)/Gamma(x) for x > 0.

    Shifts the argument above 10 with psi(x) = psi(x+1) - 1/x, then uses the
    asymptotic Bernoulli expansion.
    """
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float)).copy()
    if np.any(~(xa > 0)):
        raise ValueError("digamma: argument must be > 0")
    shift = np.zeros_like(xa)
    while True:
        low = xa < 10.0
        if not np.any(low):
            break
        shift[low] += 1.0 / xa[low]
        xa[low] += 1.0
    inv2 = 1.0 / (xa * xa)
    # Bernoulli tail: B_2k / (2k x^2k) for k = 1..7
    series = inv2 * (
        1.0 / 12
        - inv2 * (1.0 / 120
        - inv2 * (1.0 / 252
        - inv2 * (1.0 / 240
        - inv2 * (1.0 / 132
        - inv2 * (691.0 / 32760
        - inv2 * (1.0 / 12))))))
    )
    out = np.log(xa) - 0.5 / xa - series - shift
    return _scalar_or_array(out, scalar)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), (a)_0 = 1."""
    if k < 0:
        raise ValueError("pochhammer: k must be >= 0")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


class Hyp2F1Params(NamedTuple):
    a: float
    b: float
    c: float
    x: float


class SeriesResult(NamedTuple):
    value: float | np.ndarray
    tail_bound: float
    terms: int


def _is_nonpositive_integer(c: float) -> bool:
    return c <= 0 and float(c).is_integer()


def hyp2f1_series(a, b, c, x, rtol=1e-17, max_terms=20000) -> SeriesResult:
    """Sum the Gauss series with a rigorous bound on the neglected tail.

    The term ratio for index j is (a+j)(b+j)/((c+j)(j+1)) * x.  For j > k
    it is bounded by |x| (1 + |a-c|/(c+k+1)) (1 + |b-1|/(k+2)), a quantity
    decreasing in k, which gives a geometric majorant of the remainder once
    it drops below 1.  Summation stops when that majorant is below
    ``rtol`` times the partial sum.  Works for any |x| < 1; the public
    :func:`hyp2f1` restricts to |x| <= 1/2.
    """
    if _is_nonpositive_integer(c):
        raise ValueError("hyp2f1: c must not be a non-positive integer")
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    xmax = float(np.max(np.abs(xa))) if xa.size else 0.0
    if xmax >= 1.0:
        raise ValueError("hyp2f1_series: |x| must be < 1")
    term = np.ones_like(xa)
    total = np.ones_like(xa)
    bound = math.inf
    k = 0
    while k < max_terms:
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0))
        term = term * ratio * xa
        total = total + term
        k += 1
        # bound on sum_{j > k} t_j, valid when c + k > 0
        if c + k > 0:
            rho = xmax * (1.0 + abs(a - c) / (c + k)) * (1.0 + abs(b - 1.0) / (k + 1.0))
            nxt = np.max(np.abs(term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * xa))
            if nxt == 0.0:
                bound = 0.0
                break
            if rho < 1.0:
                bound = nxt / (1.0 - rho)
                if bound <= rtol * np.min(np.abs(total)):
                    break
    else:
        raise ArithmeticError("hyp2f1_series: no convergence within max_terms")
    value = float(total[0]) if scalar else total
    return SeriesResult(value, float(bound), k + 1)


def hyp2f1(a, b, c, x):
    """Gauss hypergeometric function 2F1(a, b; c; x) for |x| <= 1/2."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 0.5):
        raise ValueError("hyp2f1: argument outside the series regime |x| <= 1/2")
    return hyp2f1_series(a, b, c, x).value


def _check_half_integer(nu: float) -> None:
    if not float(2 * nu).is_integer() or int(round(2 * nu)) % 2 == 0:
        raise ValueError(f"degree {nu} is not a half-odd integer")


def legendre_p(mu: int, nu: float, x, one_minus_x=None):
    """Ferrers function P^mu_nu(x) on (0, 1] for mu in {0, -1}.

    Uses P^mu_nu(x) = ((1+x)/(1-x))^(mu/2) / Gamma(1-mu)
                      * 2F1(-nu, nu+1; 1-mu; (1-x)/2).
    ``one_minus_x`` may supply 1 - x when it is known without the
    cancellation of forming it from x near 1.
    """
    if mu not in (0, -1):
        raise ValueError("legendre_p: only mu in {0, -1} is supported")
    _check_half_integer(nu)
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xa <= 0) | (xa > 1)):
        raise ValueError("legendre_p: x must lie in (0, 1]")
    if one_minus_x is None:
        om = 1.0 - xa
    else:
        om = np.broadcast_to(np.asarray(one_minus_x, dtype=float), xa.shape)
    f = np.asarray(hyp2f1(-nu, nu + 1.0, 1.0 - mu, om / 2.0))
    if mu == 0:
        out = f
    else:
        # ((1+x)/(1-x))^(-1/2) / Gamma(2), written to stay finite at x = 1
        out = np.sqrt(om / (1.0 + xa)) * f
    return _scalar_or_array(np.asarray(out, dtype=float), scalar)


# -- complete elliptic integrals -------------------------------------------

def _agm_ke(k, kprime):
    """K and E for modulus k given both k and k' = sqrt(1-k^2) (arrays)."""
    a = np.ones_like(kprime)
    b = np.array(kprime, dtype=float, copy=True)
    c = np.array(k, dtype=float, copy=True)
    acc = 0.5 * c * c
    power = 0.5
    for _ in range(60):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        power *= 2.0
        acc = acc + power * c * c
        # quadratic convergence: the next c is ~c^2/(4a), below rounding
        if np.all(np.abs(c) <= 1e-15 * a):
            break
    kk = 0.5 * np.pi / a
    return kk, kk * (1.0 - acc)


def elliptic_k(k, kprime=None):
    """Complete elliptic integral of the first kind, modulus convention."""
    scalar = np.isscalar(k)
    ka = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any((ka < 0) | (ka >= 1)):
        raise ValueError("elliptic_k: modulus must lie in [0, 1)")
    kp = np.sqrt((1 - ka) * (1 + ka)) if kprime is None else np.atleast_1d(kprime)
    return _scalar_or_array(_agm_ke(ka, kp)[0], scalar)


def elliptic_e(k, kprime=None):
    """Complete elliptic integral of the second kind, modulus convention."""
    scalar = np.isscalar(k)
    ka = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any((ka < 0) | (ka > 1)):
        raise ValueError("elliptic_e: modulus must lie in [0, 1]")
    kp = np.sqrt((1 - ka) * (1 + ka)) if kprime is None else np.atleast_1d(kprime)
    return _scalar_or_array(_agm_ke(ka, kp)[1], scalar)


# -- Legendre Q of half-integer degree ---------------------------------------

# log of tolerated error growth in the upward recurrence
_LOG_GROWTH_LIMIT = math.log(1e3)


def _q_series(k, r):
    # Q_{k-1/2}(t) = pi (1/2)_k / k! * r^{k+1/2} * 2F1(1/2, k+1/2; k+1; r^2)
    coef = math.pi * pochhammer(0.5, k) / math.factorial(k)
    f = hyp2f1_series(0.5, k + 0.5, k + 1.0, r * r).value
    return coef * r ** (k + 0.5) * f


def legendre_q_half_ratio(k: int, r, kprime=None):
    """Q_{k-1/2}(t) parametrised by r = t - sqrt(t^2 - 1) in (0, 1).

    With t = (r + 1/r)/2 this is the natural variable of the channel
    kernels (r = min(p, q)/max(p, q)).  ``kprime`` may supply
    sqrt(1 - r^2) when it is known more accurately than 1 - r*r.

    Evaluation: for r^2 <= 1/2, or where the upward recurrence would
    amplify rounding by more than 1e3 (r^(-2k) > 1e3), the hypergeometric
    series in r^2 with certified tail; otherwise Q_{-1/2} = 2 sqrt(r) K(r),
    Q_{1/2} = 2 (K(r) - E(r)) / sqrt(r) via the AGM and the three-term
    recurrence upward in degree.
    """
    if k < 0:
        raise ValueError("legendre_q_half_ratio: k must be >= 0")
    scalar = np.isscalar(r)
    ra = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any((ra <= 0) | (ra >= 1)):
        raise ValueError("legendre_q_half_ratio: r must lie in (0, 1)")
    if kprime is None:
        kp = np.sqrt((1.0 - ra) * (1.0 + ra))
    else:
        kp = np.broadcast_to(np.asarray(kprime, dtype=float), ra.shape)
    out = np.empty_like(ra)
    m = ra * ra
    growth = 2.0 * k * np.log(1.0 / ra)
    use_series = (m <= 0.5) | (growth > _LOG_GROWTH_LIMIT)
    if np.any(use_series):
        out[use_series] = _q_series(k, ra[use_series])
    rec = ~use_series
    if np.any(rec):
        rr = ra[rec]
        kk, ee = _agm_ke(rr, kp[rec])
        sq = np.sqrt(rr)
        q_prev = 2.0 * sq * kk
        if k == 0:
            out[rec] = q_prev
        else:
            q_cur = 2.0 * (kk - ee) / sq
            t = 0.5 * (rr + 1.0 / rr)
            for j in range(1, k):
                # (j+1/2) Q_{j+1/2} = 2j t Q_{j-1/2} - (j-1/2) Q_{j-3/2}
                q_prev, q_cur = q_cur, (2.0 * j * t * q_cur - (j - 0.5) * q_prev) / (j + 0.5)
            out[rec] = q_cur
    return _scalar_or_array(out, scalar)


def _ratio_from_t(t):
    ta = np.asarray(t, dtype=float)
    tm1 = ta - 1.0
    s = np.sqrt(tm1 * (ta + 1.0))
    r = 1.0 / (ta + s)
    # 1 - r^2 = 2 s r, without cancellation
    return r, np.sqrt(2.0 * s * r)


def legendre_q_half(k: int, t):
    """Legendre function of the second kind Q_{k-1/2}(t) for t > 1, k >= 0."""
    scalar = np.isscalar(t)
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~(ta > 1.0)):
        raise ValueError("legendre_q_half: t must be > 1 (Q diverges at t = 1)")
    r, kp = _ratio_from_t(ta)
    return _scalar_or_array(np.atleast_1d(legendre_q_half_ratio(k, r, kp)), scalar)


def legendre_q_half_integral(k: int, t: float, tol: float = 1e-13) -> float:
    """Q_{k-1/2}(t) by adaptive quadrature of the integral representation.

    Q_nu(t) = int_0^r x^nu / sqrt(x^2 - 2 t x + 1) dx with r = t - sqrt(t^2-1);
    the substitution x = r sin^2(theta) gives the regular integrand
    2 r^(nu+1) sin^(2 nu + 1)(theta) / sqrt(1 - r^2 sin^2(theta)).
    Independent of :func:`legendre_q_half`; used as a cross-check.
    """
    from .quadrature import integrate_adaptive

    if not t > 1.0:
        raise ValueError("legendre_q_half_integral: t must be > 1")
    r, _ = _ratio_from_t(t)
    r = float(r)

    def integrand(theta):
        s2 = np.sin(theta) ** 2
        return s2 ** k / np.sqrt(1.0 - r * r * s2)

    res = integrate_adaptive(integrand, 0.0, 0.5 * math.pi, tol=0.0, rtol=tol)
    return 2.0 * r ** (k + 0.5) * res.value


def q_asymptotic_constant(k: int) -> float:
    """Constant c in Q_{k-1/2}(t) = -1/2 log((t-1)/2) + c + o(1), t -> 1+."""
    return -EULER_GAMMA - float(digamma(k + 0.5))


# -- Bessel J_k ---------------------------------------------------------------

def _bessel_series(k, x):
    half = 0.5 * x
    term = half ** k / math.factorial(k)
    total = term.copy() if isinstance(term, np.ndarray) else np.full_like(x, term)
    q = -half * half
    for m in range(1, 60):
        term = term * q / (m * (m + k))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _bessel_miller(k, x):
    # backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by
    # J_0 + 2 sum J_{2m} = 1
    xmax = float(np.max(x))
    start = int(max(k, xmax) + 30 + 6 * max(k, xmax) ** (1.0 / 3.0))
    start += start % 2
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    want = np.zeros_like(x)
    for n in range(start, 0, -1):
        j_prev = (2.0 * n / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds J_{n-1} (unnormalised)
        if n - 1 == k:
            want = j_cur.copy()
        if n - 1 > 0 and (n - 1) % 2 == 0:
            norm = norm + 2.0 * j_cur
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_cur = j_cur * scale
            j_next = j_next * scale
            norm = norm * scale
            want = want * scale
    norm = norm + j_cur
    return want / norm


def bessel_j(k: int, x):
    """Bessel function of the first kind J_k(x), integer k >= 0, x >= 0."""
    if k < 0:
        raise ValueError("bessel_j: k must be >= 0")
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0):
        raise ValueError("bessel_j: x must be >= 0")
    out = np.empty_like(xa)
    small = xa < 1.0
    if np.any(small):
        out[small] = _bessel_series(k, xa[small])
    if np.any(~small):
        out[~small] = _bessel_miller(k, xa[~small])
    return _scalar_or_array(out, scalar)


def q_recurrence_residual(t_values=None, k_max: int = 10) -> float:
    """Largest relative residual of the degree recurrence for Q_{k-1/2}.

    |(nu+1) Q_{nu+1} - (2nu+1) t Q_nu + nu Q_{nu-1}| / |Q_nu| over
    nu = 1/2, 3/2, ..., k_max - 1/2 and the given t values (log-spaced
    on [1.001, 1e3] by default).
    """
    if t_values is None:
        t_values = np.logspace(math.log10(1.001), 3.0, 40)
    t = np.asarray(t_values, dtype=float)
    q = [np.atleast_1d(legendre_q_half(j, t)) for j in range(k_max + 2)]
    worst = 0.0
    for j in range(1, k_max + 1):
        nu = j - 0.5
        res = (nu + 1.0) * q[j + 1] - (2.0 * nu + 1.0) * t * q[j] + nu * q[j - 1]
        worst = max(worst, float(np.max(np.abs(res) / np.abs(q[j]))))
    return worst
