"""Symmetric tridiagonal eigen-kernels: Sturm counts, bisection, inverse iteration.

The matrices here have constant off-diagonal (-1/h^2 discretizations) but the
kernels accept a general off-diagonal array.  Sturm counting uses the LDL^T
pivot recurrence; eigenvalues are isolated by bisection and eigenvectors by
inverse iteration with a banded LU solve.
"""
from __future__ import annotations

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .errors import ConvergenceError

__all__ = [
    "sturm_count",
    "eigenvalues_in_interval",
    "lowest_eigenvalues",
    "inverse_iteration",
    "gershgorin_bounds",
]

_TINY = 1e-300


@njit(cache=True)
def _sturm(diag, off2, x):
    # Number of eigenvalues strictly below x: negative pivots of T - x I.
    n = diag.shape[0]
    count = 0
    q = diag[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = _TINY
        q = diag[i] - x - off2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Count eigenvalues of tridiag(diag, off) strictly below x."""
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off2 = np.ascontiguousarray(np.asarray(off, dtype=np.float64) ** 2)
    return int(_sturm(diag, off2, float(x)))


@njit(cache=True)
def _bisect_index(diag, off2, j, lo, hi, tol):
    # Isolate the (j+1)-th smallest eigenvalue (0-based j) within [lo, hi].
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _sturm(diag, off2, mid) > j:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def _eigs_in_interval(diag, off2, lo, hi, tol):
    n_lo = _sturm(diag, off2, lo)
    n_hi = _sturm(diag, off2, hi)
    out = np.empty(n_hi - n_lo, dtype=np.float64)
    for idx in range(n_hi - n_lo):
        out[idx] = _bisect_index(diag, off2, n_lo + idx, lo, hi, tol)
    return out


def gershgorin_bounds(diag: np.ndarray, off: np.ndarray) -> tuple[float, float]:
    """Interval guaranteed to contain the whole spectrum."""
    d = np.asarray(diag, dtype=float)
    e = np.abs(np.asarray(off, dtype=float))
    r = np.zeros_like(d)
    r[:-1] += e
    r[1:] += e
    return float(np.min(d - r)), float(np.max(d + r))


def eigenvalues_in_interval(
    diag: np.ndarray,
    off: np.ndarray,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_count: int = 64,
) -> np.ndarray:
    """All eigenvalues in (lo, hi), each bisected to absolute accuracy tol.

    Refuses intervals holding more than ``max_count`` eigenvalues, which in
    this package signals a window that strayed into discretized continuum.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off2 = np.ascontiguousarray(np.asarray(off, dtype=np.float64) ** 2)
    n_inside = _sturm(diag, off2, hi) - _sturm(diag, off2, lo)
    if n_inside > max_count:
        raise ConvergenceError(
            f"window ({lo}, {hi}) contains {n_inside} eigenvalues (> {max_count}); too wide"
        )
    return _eigs_in_interval(diag, off2, lo, hi, tol)


def lowest_eigenvalues(diag: np.ndarray, off: np.ndarray, n: int, tol: float = 1e-12) -> np.ndarray:
    """The n smallest eigenvalues, by Sturm bisection from the Gershgorin bound."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = np.ascontiguousarray(diag, dtype=np.float64)
    off2 = np.ascontiguousarray(np.asarray(off, dtype=np.float64) ** 2)
    lo, hi = gershgorin_bounds(diag, off)
    out = np.empty(n)
    for j in range(n):
        out[j] = _bisect_index(d, off2, j, lo, hi, tol)
    return out


def inverse_iteration(
    diag: np.ndarray,
    off: np.ndarray,
    energy: float,
    iters: int = 5,
    seed: int = 7,
    residual_tol: float | None = None,
) -> tuple[np.ndarray, float]:
    """Eigenvector for an isolated eigenvalue near ``energy``.

    Runs 2-5 shifted banded solves from a fixed-seed random start.  Returns
    the normalized vector and the Rayleigh quotient.  Raises ConvergenceError
    when the residual stagnates above tolerance.
    """
    n = len(diag)
    d = np.asarray(diag, dtype=float)
    e = np.broadcast_to(np.asarray(off, dtype=float), (n - 1,))
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1, :] = d - energy
    ab[2, :-1] = e
    scale = float(np.max(np.abs(d)) + np.max(np.abs(e)) + abs(energy))
    if residual_tol is None:
        residual_tol = 1e-10 * scale
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    best = None
    for it in range(iters):
        try:
            w = solve_banded((1, 1), ab, v, overwrite_b=False)
        except np.linalg.LinAlgError:  # exactly singular shift: nudge
            ab[1, :] = d - (energy + 1e-14 * scale)
            w = solve_banded((1, 1), ab, v)
        w /= np.linalg.norm(w)
        tv = d * w
        tv[:-1] += e * w[1:]
        tv[1:] += e * w[:-1]
        rq = float(w @ tv)
        res = float(np.linalg.norm(tv - rq * w))
        if best is None or res < best[2]:
            best = (w, rq, res)
        if it >= 1 and res <= residual_tol:
            return w, rq
        v = w
    if best is not None and best[2] <= residual_tol:
        return best[0], best[1]
    raise ConvergenceError(
        f"inverse iteration stagnated: residual {best[2]:.3e} > {residual_tol:.3e}"
    )
