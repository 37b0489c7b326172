"""Reduced momentum-space kernels.

Natural units m = c = hbar = 1.  The channel kernels carry no coupling
prefactor; the quadratic forms in :mod:`br2d.spectral` multiply them by
delta/pi.
"""

from __future__ import annotations

import numpy as np

from . import specfun

__all__ = [
    "energy",
    "norm_factor",
    "beta_weights",
    "beta_weights_quotient",
    "channel_degrees",
    "channel_kernel",
    "diagonal_remainder",
    "full_kernel",
    "reflection_probe",
    "dominance_gap",
]


def energy(p):
    """Relativistic kinetic energy e(p) = sqrt(p^2 + 1)."""
    return np.hypot(p, 1.0)


def norm_factor(p):
    """n(p) = sqrt(2 e(p) (e(p) + 1))."""
    e = energy(p)
    return np.sqrt(2.0 * e * (e + 1.0))


def beta_weights(p, q):
    """Angular weights (beta1, beta2) of the channel kernels.

    beta1 = 1/2 sqrt(1 + 1/e(p)) sqrt(1 + 1/e(q)),
    beta2 = 1/2 sqrt(1 - 1/e(p)) sqrt(1 - 1/e(q)).
    1 - 1/e is evaluated as p^2 / (e (e + 1)) to keep it accurate at small p.
    """
    ep, eq = energy(p), energy(q)
    b1 = 0.5 * np.sqrt((1.0 + 1.0 / ep) * (1.0 + 1.0 / eq))
    mp = np.asarray(p, dtype=float) ** 2 / (ep * (ep + 1.0))
    mq = np.asarray(q, dtype=float) ** 2 / (eq * (eq + 1.0))
    b2 = 0.5 * np.sqrt(mp * mq)
    return b1, b2


def beta_weights_quotient(p, q):
    """Same weights in the quotient form (e+1)(e'+1)/(n n') and p p'/(n n')."""
    ep, eq = energy(p), energy(q)
    nn = norm_factor(p) * norm_factor(q)
    return (ep + 1.0) * (eq + 1.0) / nn, np.asarray(p) * np.asarray(q) / nn


def channel_degrees(k: int) -> tuple[int, int]:
    """Indices (j1, j2) such that K_k = beta1 Q_{j1-1/2} + beta2 Q_{j2-1/2}."""
    k = int(k)
    if k >= 0:
        return k, k + 1
    # Q_{-k-1/2}, Q_{-k-3/2}; the second has degree -1/2 when k = -1
    return -k, -k - 1


def _ratio(p, q):
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    r = lo / hi
    # sqrt(1 - r^2) from the difference, exact near the diagonal
    kp = np.sqrt((hi - lo) * (hi + lo)) / hi
    return r, kp


def channel_kernel(k: int, p, q):
    """Partial-wave kernel K_k(p, q) for p != q, both positive.

    K_k = beta1 Q_{k-1/2}(t) + beta2 Q_{k+1/2}(t)          (k >= 0)
    K_k = beta1 Q_{-k-1/2}(t) + beta2 Q_{-k-3/2}(t)        (k < 0)
    with t = (p/q + q/p)/2, which enters only through r = min/max.
    """
    pa = np.asarray(p, dtype=float)
    qa = np.asarray(q, dtype=float)
    scalar = pa.ndim == 0 and qa.ndim == 0
    pa, qa = np.broadcast_arrays(np.atleast_1d(pa), np.atleast_1d(qa))
    if np.any(pa <= 0) or np.any(qa <= 0):
        raise ValueError("channel_kernel: momenta must be positive")
    if np.any(pa == qa):
        raise ValueError("channel_kernel: logarithmic singularity at p = q")
    r, kp = _ratio(pa, qa)
    j1, j2 = channel_degrees(k)
    b1, b2 = beta_weights(pa, qa)
    out = (b1 * specfun.legendre_q_half_ratio(j1, r.ravel(), kp.ravel()).reshape(r.shape)
           + b2 * specfun.legendre_q_half_ratio(j2, r.ravel(), kp.ravel()).reshape(r.shape))
    return float(out[0]) if scalar else out


def diagonal_remainder(k: int, p):
    """lim_{q -> p} K_k(p, q) + log|p - q|.

    From Q_{j-1/2}(t) = -1/2 log((t-1)/2) - gamma - psi(j+1/2) + o(1) and
    (t-1)/2 = (p-q)^2/(4pq), with beta1 + beta2 = 1 on the diagonal.
    """
    pa = np.asarray(p, dtype=float)
    j1, j2 = channel_degrees(k)
    b1, b2 = beta_weights(pa, pa)
    return (np.log(2.0 * pa) - specfun.EULER_GAMMA
            - b1 * specfun.digamma(j1 + 0.5) - b2 * specfun.digamma(j2 + 0.5))


def full_kernel(a, b) -> complex:
    """Two-dimensional kernel K(p, p') for momenta given as (p1, p2) pairs.

    K = ((E(p)+1)(E(p')+1) + p conj(p')) / (N(p) N(p') |p - p'|),
    with p = p1 + i p2 read as a complex number.
    """
    pa = complex(a[0], a[1])
    pb = complex(b[0], b[1])
    dist = abs(pa - pb)
    if dist == 0.0:
        raise ValueError("full_kernel: singular at coinciding momenta")
    ea, eb = energy(abs(pa)), energy(abs(pb))
    num = (ea + 1.0) * (eb + 1.0) + pa * pb.conjugate()
    return num / (norm_factor(abs(pa)) * norm_factor(abs(pb)) * dist)


def reflection_probe(k: int, p, q) -> dict:
    """Compare K_k with K_{-k-1} and with the beta-swapped K_{-k-1}.

    Reports the maximal relative differences; asserts nothing.
    """
    pa, qa = np.broadcast_arrays(np.atleast_1d(np.asarray(p, float)),
                                 np.atleast_1d(np.asarray(q, float)))
    kk = channel_kernel(k, pa, qa)
    km = channel_kernel(-k - 1, pa, qa)
    r, kp = _ratio(pa, qa)
    b1, b2 = beta_weights(pa, qa)
    j1, j2 = channel_degrees(-k - 1)
    swapped = (b2 * specfun.legendre_q_half_ratio(j1, r.ravel(), kp.ravel()).reshape(r.shape)
               + b1 * specfun.legendre_q_half_ratio(j2, r.ravel(), kp.ravel()).reshape(r.shape))
    return {
        "k": k,
        "mirror": -k - 1,
        "plain_rel_diff": float(np.max(np.abs(kk - km) / kk)),
        "swapped_rel_diff": float(np.max(np.abs(kk - swapped) / kk)),
    }


def dominance_gap(k: int, p, q) -> float:
    """max over the sample pairs of K_k - K_0 (<= 0 when K_0 dominates)."""
    pa, qa = np.broadcast_arrays(np.atleast_1d(np.asarray(p, float)),
                                 np.atleast_1d(np.asarray(q, float)))
    mask = pa != qa
    return float(np.max(channel_kernel(k, pa[mask], qa[mask])
                        - channel_kernel(0, pa[mask], qa[mask])))
