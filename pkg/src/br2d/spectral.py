"""Nystrom discretisation of the channel forms and their lowest eigenvalue.

The form of channel k at coupling delta is

    b_k[a] = int e(r) |a(r)|^2 dr - (delta/pi) int int a(r) a(r') K_k(r, r') dr dr'.

On a radial grid with weights w_i the symmetrised unknowns g_i = sqrt(w_i) a(p_i)
turn it into g^T M g with

    M = diag(e(p_i)) - (delta/pi) A,   A_ij = sqrt(w_i w_j) K_k(p_i, p_j).

Entries with |i - j| <= 1 use cell averages of K_k (see
:mod:`br2d.quadrature`) because the kernel is log-singular on the diagonal.
Reported eigenvalues belong to the discrete matrix; they carry the grid
description and are not extrapolated.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, kernel, quadrature
from .quadrature import RadialGrid

__all__ = [
    "EigenSolverError",
    "ChannelForm",
    "SpectralReport",
    "potential_matrix",
    "assemble_form",
    "tridiagonalize",
    "sturm_count",
    "lowest_eigenpair",
    "lowest_eigenvalue",
    "rayleigh_quotient",
    "sample_vector",
    "form_value",
    "delta_sweep",
    "write_reports",
]

RESIDUAL_RTOL = 1e-8


class EigenSolverError(RuntimeError):
    pass


@dataclass
class ChannelForm:
    delta: float
    channel: int
    grid: RadialGrid
    matrix: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray

    @property
    def n(self) -> int:
        return self.grid.n


@dataclass
class SpectralReport:
    delta: float
    channel: int
    n: int
    lowest_eigenvalue: float
    residual_norm: float
    matrix_norm: float
    grid: dict
    eigenvector: np.ndarray | None = field(default=None, repr=False)

    def row(self) -> dict:
        return {
            "delta": self.delta,
            "k": self.channel,
            "n": self.n,
            "p_max": self.grid["p_max"],
            "lambda_min": self.lowest_eigenvalue,
            "residual": self.residual_norm,
        }


def potential_matrix(grid: RadialGrid, k: int, order: int = 12) -> np.ndarray:
    """Symmetric weighted kernel matrix A (without the delta/pi factor)."""
    p = grid.nodes
    w = grid.weights
    n = grid.n
    iu, ju = np.triu_indices(n, 2)
    A = np.zeros((n, n))
    vals = kernel.channel_kernel(k, p[iu], p[ju]) * np.sqrt(w[iu] * w[ju])
    A[iu, ju] = vals
    for i in range(n):
        A[i, i] = quadrature.diagonal_cell_weight(grid, i, k, order)
    for i in range(n - 1):
        A[i, i + 1] = quadrature.neighbour_cell_weight(grid, i, k, order)
    # mirror the strict upper triangle exactly
    A = np.triu(A) + np.triu(A, 1).T
    return A


def assemble_form(grid: RadialGrid, k: int, delta: float,
                  potential: np.ndarray | None = None) -> ChannelForm:
    """Nystrom matrix of b_k at coupling ``delta`` on ``grid``."""
    if not delta >= 0:
        raise ValueError("assemble_form: delta must be >= 0")
    kin = kernel.energy(grid.nodes)
    A = potential_matrix(grid, k) if potential is None else potential
    M = np.diag(kin) - (delta / math.pi) * A
    return ChannelForm(float(delta), int(k), grid, M, kin, A)


# -- dense symmetric eigensolver ---------------------------------------------

def tridiagonalize(M: np.ndarray):
    """Householder reduction Q^T M Q = T.

    Returns (d, e, vs): diagonal, off-diagonal and the list of unit
    Householder vectors, vs[j] acting on components j+1..n-1.
    """
    A = np.array(M, dtype=float, copy=True)
    n = A.shape[0]
    vs = []
    for j in range(n - 2):
        x = A[j + 1:, j]
        sigma = np.linalg.norm(x)
        if sigma == 0.0:
            vs.append(None)
            continue
        alpha = -math.copysign(sigma, x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        B = A[j + 1:, j + 1:]
        p = 2.0 * (B @ v)
        w = p - (v @ p) * v
        B -= np.outer(v, w) + np.outer(w, v)
        A[j + 1, j] = A[j, j + 1] = alpha
        A[j + 2:, j] = 0.0
        A[j, j + 2:] = 0.0
        vs.append(v)
    d = np.diag(A).copy()
    e = np.diag(A, 1).copy()
    return d, e, vs


def sturm_count(d: np.ndarray, e: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the tridiagonal (d, e) below x."""
    tiny = np.finfo(float).tiny ** 0.5
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0.0:
            q = tiny
        q = d[i] - x - e[i - 1] ** 2 / q
        if q < 0:
            count += 1
    return count


def _back_transform(vs, y):
    x = y.copy()
    for j in range(len(vs) - 1, -1, -1):
        v = vs[j]
        if v is None:
            continue
        seg = x[j + 1:]
        seg -= 2.0 * (v @ seg) * v
    return x


def lowest_eigenpair(M: np.ndarray, max_inverse_steps: int = 5):
    """Smallest eigenvalue and unit eigenvector of a symmetric matrix.

    Householder tridiagonalisation, Sturm-sequence bisection for the
    eigenvalue, inverse iteration on the tridiagonal matrix for the
    vector, then a Rayleigh-quotient refinement on M itself.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 1:
        return float(M[0, 0]), np.ones(1)
    d, e, vs = tridiagonalize(M)
    ae = np.abs(e)
    rad = np.concatenate(([0.0], ae)) + np.concatenate((ae, [0.0]))
    lo = float(np.min(d - rad))
    hi = float(np.max(d + rad))
    scale = max(abs(lo), abs(hi), 1.0)
    while hi - lo > 4.0 * np.finfo(float).eps * scale:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(d, e, mid) >= 1:
            hi = mid
        else:
            lo = mid
    lam = 0.5 * (lo + hi)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    shift = lam - 8.0 * np.finfo(float).eps * scale
    y = np.ones(n) / math.sqrt(n)
    for _ in range(max_inverse_steps):
        try:
            z = np.linalg.solve(T - shift * np.eye(n), y)
        except np.linalg.LinAlgError:
            shift -= 64.0 * np.finfo(float).eps * scale
            continue
        nz = np.linalg.norm(z)
        if not np.isfinite(nz) or nz == 0.0:
            raise EigenSolverError("inverse iteration broke down")
        z /= nz
        done = np.linalg.norm(T @ z - lam * z) <= 1e-13 * scale
        y = z
        if done:
            break
    x = _back_transform(vs, y)
    x /= np.linalg.norm(x)
    lam = float(x @ M @ x)
    return lam, x


def lowest_eigenvalue(form: ChannelForm) -> SpectralReport:
    M = form.matrix
    lam, v = lowest_eigenpair(M)
    res = float(np.linalg.norm(M @ v - lam * v))
    mnorm = float(np.linalg.norm(M))
    if res > RESIDUAL_RTOL * mnorm:
        raise EigenSolverError(f"eigen-residual {res:.3e} exceeds {RESIDUAL_RTOL:g} * |M|")
    return SpectralReport(form.delta, form.channel, form.n, lam, res, mnorm,
                          form.grid.describe(), v)


def rayleigh_quotient(form: ChannelForm, samples) -> float:
    """v^T M v / v^T v for a vector in the symmetrised variables."""
    v = np.asarray(samples, dtype=float)
    nv = float(v @ v)
    if nv == 0.0:
        raise ValueError("rayleigh_quotient: zero vector")
    return float(v @ form.matrix @ v) / nv


def sample_vector(grid: RadialGrid, f) -> np.ndarray:
    """Symmetrised samples sqrt(w_i) f(p_i) of a radial function."""
    return np.sqrt(grid.weights) * np.asarray(f(grid.nodes), dtype=float)


def form_value(form: ChannelForm, f) -> float:
    """Discrete approximation of b_k[f] for a radial function f."""
    g = sample_vector(form.grid, f)
    return float(g @ form.matrix @ g)


def delta_sweep(grid: RadialGrid, k: int, deltas, out=None, fmt: str = "json"):
    """One SpectralReport per coupling; optionally written to ``out``."""
    deltas = list(deltas)
    if not deltas:
        raise ValueError("delta_sweep: need at least one delta")
    A = potential_matrix(grid, k)
    reports = [lowest_eigenvalue(assemble_form(grid, k, d, A)) for d in deltas]
    if out is not None:
        write_reports(reports, out, fmt)
    return reports


def write_reports(reports, out, fmt: str = "json", extra: dict | None = None) -> str:
    """Serialise report rows as CSV or JSON; ``out`` is a path or file object."""
    rows = [r.row() for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    elif fmt == "json":
        doc = {"version": __version__, "rows": rows,
               "grid": reports[0].grid, **(extra or {})}
        text = json.dumps(doc, indent=2)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
