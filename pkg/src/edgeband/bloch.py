"""Plane-wave Floquet-Bloch solver for Hill operators -(d/dx + ik)^2 + Q(x).

Basis functions are e^{2 pi i m x}, m = -M..M, so the quasimomentum enters
only through the real diagonal (k + 2 pi m)^2 and the matrix is real
symmetric for any real cosine series Q.  At the high-symmetry point k = pi an
even-index Q decouples the problem into even-index / odd-index Fourier
sectors, which is how the degenerate crossings are resolved.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .potentials import EVEN, CosineSeries

__all__ = [
    "PlaneWaveBasis",
    "BlochMode",
    "BandStructure",
    "bloch_spectrum",
    "band_sweep",
    "parity_spectrum",
    "inversion_map",
    "write_band_csv",
    "K_STAR",
]

K_STAR = np.pi
FULL = "full"
SECTOR_EVEN = "even-index"
SECTOR_ODD = "odd-index"


@dataclass(frozen=True)
class PlaneWaveBasis:
    """Truncated exponential basis e^{2 pi i m x} with |m| <= M.

    ``sector`` restricts the index set to even or odd m, which is only
    meaningful (and only allowed) at k = pi.
    """

    M: int
    k: float
    sector: str = FULL

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.sector not in (FULL, SECTOR_EVEN, SECTOR_ODD):
            raise ValueError(f"unknown sector {self.sector!r}")
        if self.sector != FULL and abs(self.k - K_STAR) > 1e-12:
            raise ValueError("sector bases are only defined at k = pi")
        if not 0.0 <= self.k <= 2.0 * np.pi:
            raise ValueError("quasimomentum must lie in the Brillouin zone [0, 2pi]")

    @property
    def indices(self) -> np.ndarray:
        m = np.arange(-self.M, self.M + 1)
        if self.sector == SECTOR_EVEN:
            return m[m % 2 == 0]
        if self.sector == SECTOR_ODD:
            return m[m % 2 != 0]
        return m

    @property
    def dimension(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class BlochMode:
    """One Floquet-Bloch eigenpair in a truncated plane-wave basis."""

    k: float
    band: int
    energy: float
    coeffs: np.ndarray      # complex, aligned with ``indices``
    indices: np.ndarray     # Fourier indices m

    def coefficient(self, m: int) -> complex:
        hit = np.nonzero(self.indices == m)[0]
        return complex(self.coeffs[hit[0]]) if hit.size else 0.0j

    def embed(self, indices: np.ndarray) -> np.ndarray:
        """Coefficient vector re-expressed on another index set (zeros elsewhere)."""
        out = np.zeros(len(indices), dtype=complex)
        pos = {int(m): i for i, m in enumerate(indices)}
        for m, c in zip(self.indices, self.coeffs):
            i = pos.get(int(m))
            if i is not None:
                out[i] = c
        return out

    def dominant_index(self) -> int:
        return int(self.indices[np.argmax(np.abs(self.coeffs))])

    def evaluate(self, x, chunk: int = 1 << 15) -> np.ndarray:
        """Phi(x) = sum_m c(m) e^{i(k + 2 pi m)x} on a grid, chunked for memory."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        waves = self.k + 2.0 * np.pi * self.indices
        out = np.empty(len(x), dtype=complex)
        for start in range(0, len(x), chunk):
            seg = x[start:start + chunk]
            out[start:start + chunk] = np.exp(1j * np.outer(seg, waves)) @ self.coeffs
        return out


@dataclass(frozen=True, eq=False)
class BandStructure:
    """Lowest bands sampled on a k grid over the Brillouin zone [0, 2pi]."""

    k_grid: np.ndarray
    bands: np.ndarray      # shape (len(k_grid), n_bands), ascending rows
    n_bands: int


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    # Deterministic phase: make the largest-magnitude entry positive.
    i = int(np.argmax(np.abs(vec)))
    return -vec if vec[i] < 0 else vec


def hill_matrix(Q: CosineSeries, k: float, M: int) -> np.ndarray:
    """Real symmetric plane-wave matrix H_mn = (k+2 pi m)^2 delta_mn + Qhat(m-n)."""
    if M < Q.max_harmonic + 2:
        raise ValueError(f"M={M} too small for harmonics up to {Q.max_harmonic}; need M >= maxharm+2")
    m = np.arange(-M, M + 1)
    H = np.zeros((2 * M + 1, 2 * M + 1))
    np.fill_diagonal(H, (k + 2.0 * np.pi * m) ** 2 + Q.constant_term)
    for p, a in Q.harmonics:
        half = 0.5 * a
        idx = np.arange(2 * M + 1 - p)
        H[idx, idx + p] += half
        H[idx + p, idx] += half
    return H


def _sector_matrix(Q: CosineSeries, indices: np.ndarray) -> np.ndarray:
    H = np.zeros((len(indices), len(indices)))
    np.fill_diagonal(H, (K_STAR + 2.0 * np.pi * indices) ** 2 + Q.constant_term)
    diffs = np.abs(indices[:, None] - indices[None, :])
    for p, a in Q.harmonics:
        H[diffs == p] += 0.5 * a
    return H


def bloch_spectrum(Q: CosineSeries, k: float, M: int, n_bands: int) -> list[BlochMode]:
    """Lowest n_bands eigenpairs of the truncated Hill operator at quasimomentum k.

    Eigenvalues ascend with repetition; eigenvectors are orthonormal, real,
    and sign-fixed (largest-|c| entry positive).
    """
    if not 1 <= n_bands <= 2 * M + 1:
        raise ValueError("need 1 <= n_bands <= 2M+1")
    H = hill_matrix(Q, k, M)
    evals, evecs = np.linalg.eigh(H)
    indices = np.arange(-M, M + 1)
    return [
        BlochMode(k, b + 1, float(evals[b]), _fix_sign(evecs[:, b]).astype(complex), indices)
        for b in range(n_bands)
    ]


def _worker_count() -> int:
    env = os.environ.get("EDGEBAND_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def band_sweep(Q: CosineSeries, k_samples: int, M: int, n_bands: int) -> BandStructure:
    """Band energies on a uniform grid over [0, 2pi] with k = pi always included."""
    if k_samples < 3:
        raise ValueError("k_samples must be >= 3")
    grid = np.linspace(0.0, 2.0 * np.pi, k_samples)
    if not np.any(np.isclose(grid, K_STAR, atol=1e-14)):
        grid = np.sort(np.append(grid, K_STAR))

    def column(k: float) -> np.ndarray:
        H = hill_matrix(Q, k, M)
        return np.linalg.eigvalsh(H)[:n_bands]

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(column, grid))
    else:
        cols = [column(k) for k in grid]
    return BandStructure(grid, np.array(cols), n_bands)


def parity_spectrum(Q: CosineSeries, sector: str, M: int, n: int) -> list[BlochMode]:
    """Lowest n eigenpairs of the k = pi problem restricted to one Fourier parity sector.

    Q must be an even-index series so the full matrix block-decouples; the
    restricted problem has generically simple eigenvalues, and the real
    sign-fixed eigenvectors pin the phase convention used everywhere
    downstream.
    """
    if Q.parity != EVEN:
        raise ValueError("parity sectors require an even-index potential")
    basis = PlaneWaveBasis(M, K_STAR, sector)
    indices = basis.indices
    if M < Q.max_harmonic + 2:
        raise ValueError(f"M={M} too small for harmonics up to {Q.max_harmonic}")
    if not 1 <= n <= len(indices):
        raise ValueError("n out of range for this sector")
    H = _sector_matrix(Q, indices)
    evals, evecs = np.linalg.eigh(H)
    return [
        BlochMode(K_STAR, b + 1, float(evals[b]), _fix_sign(evecs[:, b]).astype(complex), indices)
        for b in range(n)
    ]


def inversion_map(mode: BlochMode, drop_tol: float = 1e-12) -> BlochMode:
    """Image of a k = pi mode under x -> -x:  c'(m) = c(-m-1).

    Maps even-index support to odd-index support and back; the energy is
    unchanged.  Coefficients whose source index falls outside the truncation
    are zero-padded; if the dropped mass exceeds ``drop_tol`` a ValueError is
    raised, since the image would no longer be a faithful eigenvector.
    """
    if abs(mode.k - K_STAR) > 1e-12:
        raise ValueError("inversion_map is defined at k = pi only")
    M = int(np.max(np.abs(mode.indices)))
    src = {int(m): c for m, c in zip(mode.indices, mode.coeffs)}
    out_indices = np.sort(np.array([-m - 1 for m in mode.indices if -M <= -m - 1 <= M]))
    dropped = sum(abs(src[int(m)]) ** 2 for m in mode.indices if not -M <= -int(m) - 1 <= M)
    if dropped > drop_tol:
        raise ValueError(f"inversion dropped coefficient mass {dropped:.3e} > {drop_tol:.1e}; increase M")
    coeffs = np.array([src.get(-int(m) - 1, 0.0j) for m in out_indices], dtype=complex)
    return BlochMode(mode.k, mode.band, mode.energy, coeffs, out_indices)


def apply_hamiltonian(Q: CosineSeries, mode: BlochMode) -> np.ndarray:
    """H(k) applied to the mode's coefficient vector on its own index set."""
    idx = mode.indices
    out = ((mode.k + 2.0 * np.pi * idx) ** 2 + Q.constant_term) * mode.coeffs
    pos = {int(m): i for i, m in enumerate(idx)}
    for p, a in Q.harmonics:
        for i, m in enumerate(idx):
            for shift in (p, -p):
                j = pos.get(int(m) + shift)
                if j is not None:
                    out[i] += 0.5 * a * mode.coeffs[j]
    return out


def write_band_csv(bs: BandStructure, path: str) -> None:
    """Band CSV: columns k, E_1..E_n at 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("k," + ",".join(f"E_{b}" for b in range(1, bs.n_bands + 1)) + "\n")
        for k, row in zip(bs.k_grid, bs.bands):
            fh.write(format(k, ".17g") + "," + ",".join(format(e, ".17g") for e in row) + "\n")
