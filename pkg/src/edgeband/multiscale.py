"""Two-term multiscale ansatz: leading state, spectral-resolvent corrector, E2.

The leading term psi0(x, X) = alpha1(X) Phi1(x) + alpha2(X) Phi2(x) pairs the
Dirac zero mode with the degenerate pair.  The first corrector is separable,

    psi1_p = sum_i [R(E_star) P_perp f_i](x) * g_i(X),

with x-parts f_i in {2 dPhi_j/dx, -W Phi_j} and envelopes g_i in
{alpha_j', kappa alpha_j}; the resolvent acts band-by-band in the truncated
k = pi eigenbasis.  All x inner products are exact coefficient sums; only the
final X integrals use quadrature.  Envelope derivatives come from the
analytic identity alpha' = -sigma kappa alpha, never from differencing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .bloch import K_STAR, hill_matrix
from .dirac import DiracPointCertificate
from .dirac1d import ZeroMode
from .errors import ConvergenceError
from .potentials import ODD, CosineSeries

__all__ = [
    "SeparableTerm",
    "SeparableState",
    "SecondOrderEnergy",
    "AnsatzSample",
    "solve_corrector",
    "compute_E2",
    "synthesize_ansatz",
]

ENV_DALPHA = "dalpha"   # envelope alpha_j'
ENV_KALPHA = "kalpha"   # envelope kappa * alpha_j


def apply_w(coeffs: np.ndarray, indices: np.ndarray, W: CosineSeries) -> np.ndarray:
    """Coefficients of W(x) * (sum c(m) e^{i(pi+2pi m)x}) on the same index set."""
    pos = {int(m): i for i, m in enumerate(indices)}
    out = np.zeros_like(coeffs)
    for p, w in W.harmonics:
        half = 0.5 * w
        for i, m in enumerate(indices):
            for src in (int(m) - p, int(m) + p):
                j = pos.get(src)
                if j is not None:
                    out[i] += half * coeffs[j]
    return out


def eval_fourier(coeffs: np.ndarray, indices: np.ndarray, x, chunk: int = 1 << 15) -> np.ndarray:
    """sum_m c(m) e^{i(pi + 2 pi m)x} on a grid, chunked."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    waves = K_STAR + 2.0 * np.pi * indices
    out = np.empty(len(x), dtype=complex)
    for s in range(0, len(x), chunk):
        seg = x[s:s + chunk]
        out[s:s + chunk] = np.exp(1j * np.outer(seg, waves)) @ coeffs
    return out


@dataclass(frozen=True, eq=False)
class SeparableTerm:
    """One separable corrector term: resolvent image (x) times envelope tag (X)."""

    label: str
    j: int                      # envelope slot: pairs with alpha_j
    envelope_kind: str          # ENV_DALPHA or ENV_KALPHA
    resolvent_coeffs: np.ndarray   # u_i = R(E_star) P_perp f_i
    projected_source: np.ndarray   # P_perp f_i (for residual checks)


@dataclass(frozen=True, eq=False)
class SeparableState:
    """The corrector psi1_p as a sum of separable terms on one x/X bookkeeping."""

    terms: tuple[SeparableTerm, ...]
    indices: np.ndarray
    E_star: float
    M: int
    kernel_coeffs: tuple[np.ndarray, np.ndarray]   # phi1, phi2 on the full index set
    kernel_orthogonality: float
    W: CosineSeries


@dataclass(frozen=True)
class SecondOrderEnergy:
    """E2 with its reality and quadrature diagnostics."""

    value: float
    imag_residual: float
    quadrature_error_estimate: float
    n_terms: int


def _full_eigensystem(V: CosineSeries, M: int):
    H = hill_matrix(V, K_STAR, M)
    evals, evecs = np.linalg.eigh(H)
    return evals, evecs


def solve_corrector(
    cert: DiracPointCertificate,
    W: CosineSeries,
    zm: ZeroMode,
    M: int | None = None,
    denom_floor: float = 1e-6,
) -> SeparableState:
    """Separable corrector from the spectral resolvent at the Dirac point.

    For each x-part f_i the resolvent sum runs over every band except the
    crossing pair; an accidental near-degeneracy (|E_b - E_star| below
    ``denom_floor`` relative) is reported with the offending band.
    """
    if W.parity != ODD and W.harmonics:
        raise ValueError("solve_corrector requires an odd-index W")
    M = cert.M if M is None else M
    V = cert.potential
    evals, evecs = _full_eigensystem(V, M)
    indices = np.arange(-M, M + 1)
    pair = np.sort(np.argsort(np.abs(evals - cert.E_star))[:2])
    keep = np.ones(len(evals), dtype=bool)
    keep[pair] = False
    denoms = evals[keep] - cert.E_star
    floor = denom_floor * max(1.0, abs(cert.E_star))
    if np.any(np.abs(denoms) < floor):
        bad = np.arange(len(evals))[keep][np.abs(denoms) < floor]
        raise ConvergenceError(
            f"near-zero resolvent denominator at band(s) {bad + 1}: accidental "
            f"near-degeneracy with E_star = {cert.E_star:.6f}"
        )
    c1 = cert.phi1.embed(indices)
    c2 = cert.phi2.embed(indices)
    kvec = 1j * (K_STAR + 2.0 * np.pi * indices)
    kernel = evecs[:, pair]

    def resolve(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        f_perp = f - kernel @ (kernel.T @ f)
        amps = evecs.T @ f_perp
        amps[pair] = 0.0
        u = evecs @ (amps / np.where(keep, evals - cert.E_star, 1.0) * keep)
        return u, f_perp

    terms = []
    ortho = 0.0
    for j, cj in ((1, c1), (2, c2)):
        for label, f, kind in (
            (f"dx_phi{j}", 2.0 * kvec * cj, ENV_DALPHA),
            (f"w_phi{j}", -apply_w(cj, indices, W), ENV_KALPHA),
        ):
            u, f_perp = resolve(f)
            terms.append(SeparableTerm(label, j, kind, u, f_perp))
            ortho = max(ortho, abs(np.vdot(c1, u)), abs(np.vdot(c2, u)))
    return SeparableState(
        terms=tuple(terms),
        indices=indices,
        E_star=cert.E_star,
        M=M,
        kernel_coeffs=(c1, c2),
        kernel_orthogonality=float(ortho),
        W=W,
    )


def _envelope_tables(zm: ZeroMode, X: np.ndarray):
    """alpha_j, alpha_j'' and the four g_i, g_i' envelope arrays on X."""
    wall = zm.spec.wall
    kap = wall.evaluate(X)
    dkap = wall.derivative(X)
    sig = zm.sigma
    a1, a2 = zm.components(X)
    alpha = {1: a1, 2: a2}
    dd_factor = sig**2 * kap**2 - sig * dkap          # alpha'' = (...) alpha
    g = {}
    dg = {}
    for j in (1, 2):
        g[(ENV_DALPHA, j)] = -sig * kap * alpha[j]
        dg[(ENV_DALPHA, j)] = dd_factor * alpha[j]
        g[(ENV_KALPHA, j)] = kap * alpha[j]
        dg[(ENV_KALPHA, j)] = (dkap - sig * kap**2) * alpha[j]
    return alpha, dd_factor, kap, g, dg


def compute_E2(
    cert: DiracPointCertificate,
    corrector: SeparableState,
    zm: ZeroMode,
    imag_tol: float = 1e-8,
) -> SecondOrderEnergy:
    """Second-order energy from the solvability condition at order delta^2.

    Forms G2 = (2 d_x d_X - kappa W) psi1_p + d_X^2 psi0, projects onto the
    degenerate pair with exact coefficient sums, and pairs against the zero
    mode by Simpson quadrature over the envelope grid.
    """
    W = corrector.W
    c1, c2 = corrector.kernel_coeffs
    indices = corrector.indices
    kvec = 1j * (K_STAR + 2.0 * np.pi * indices)
    X = zm.X
    alpha, dd_factor, kap, g, dg = _envelope_tables(zm, X)

    proj = {1: c1, 2: c2}
    # G2 projected on phi_j: sum_i [A_ji g_i'(X) - B_ji kappa g_i(X)] + alpha_j''
    G = {1: (dd_factor * alpha[1]).astype(complex), 2: (dd_factor * alpha[2]).astype(complex)}
    for term in corrector.terms:
        du = kvec * term.resolvent_coeffs
        wu = apply_w(term.resolvent_coeffs, indices, W)
        for j in (1, 2):
            A = 2.0 * np.vdot(proj[j], du)
            B = np.vdot(proj[j], wu)
            if A != 0.0:
                G[j] = G[j] + A * dg[(term.envelope_kind, term.j)]
            if B != 0.0:
                G[j] = G[j] - B * kap * g[(term.envelope_kind, term.j)]

    integrand = np.conjugate(alpha[1]) * G[1] + np.conjugate(alpha[2]) * G[2]
    e2 = -complex(simpson(integrand, x=X))
    e2_coarse = -complex(simpson(integrand[::2], x=X[::2]))
    imag_res = abs(e2.imag)
    if imag_res > imag_tol * max(1.0, abs(e2)):
        raise ConvergenceError(f"E2 imaginary residual {imag_res:.3e} exceeds {imag_tol:.1e}")
    return SecondOrderEnergy(
        value=float(e2.real),
        imag_residual=float(imag_res),
        quadrature_error_estimate=float(abs(e2 - e2_coarse)),
        n_terms=len(corrector.terms),
    )


@dataclass(frozen=True, eq=False)
class AnsatzSample:
    """The two-term ansatz sampled on an x grid, with x-derivatives."""

    x: np.ndarray
    delta: float
    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    leading: np.ndarray        # delta^{1/2} psi0 alone
    corrector_part: np.ndarray # delta^{3/2} psi1_p alone


def synthesize_ansatz(
    cert: DiracPointCertificate,
    corrector: SeparableState,
    zm: ZeroMode,
    delta: float,
    x_grid: np.ndarray,
) -> AnsatzSample:
    """delta^{1/2} psi0(x, delta x) + delta^{3/2} psi1_p(x, delta x) with d/dx, d2/dx2.

    The chain rule mixes x and X derivatives: d/dx = d_x + delta d_X.  The
    envelope is extended by its asymptotic exponential beyond the zero-mode
    grid, so any x range is admissible.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    x = np.asarray(x_grid, dtype=float)
    X = delta * x
    indices = corrector.indices
    c1, c2 = corrector.kernel_coeffs
    kvec = 1j * (K_STAR + 2.0 * np.pi * indices)

    alpha, dd_factor, kap, g, dg = _envelope_tables(zm, X)
    dkap = zm.spec.wall.derivative(X)
    d2kap = zm.spec.wall.second_derivative(X)
    sig = zm.sigma
    dalpha = {j: -sig * kap * alpha[j] for j in (1, 2)}
    ddalpha = {j: dd_factor * alpha[j] for j in (1, 2)}

    # second X-derivatives of the envelope tags
    ddg = {}
    for j in (1, 2):
        # (alpha')'' = d/dX [ (sig^2 k^2 - sig k') alpha ]
        ddg[(ENV_DALPHA, j)] = (
            (2.0 * sig**2 * kap * dkap - sig * d2kap) * alpha[j]
            + dd_factor * dalpha[j]
        )
        # (k alpha)'' = k'' alpha + 2 k' alpha' + k alpha''
        ddg[(ENV_KALPHA, j)] = d2kap * alpha[j] + 2.0 * dkap * dalpha[j] + kap * ddalpha[j]

    phi = {j: eval_fourier(c, indices, x) for j, c in ((1, c1), (2, c2))}
    dphi = {j: eval_fourier(kvec * c, indices, x) for j, c in ((1, c1), (2, c2))}
    d2phi = {j: eval_fourier(kvec**2 * c, indices, x) for j, c in ((1, c1), (2, c2))}

    psi0 = sum(alpha[j] * phi[j] for j in (1, 2))
    psi0_x = sum(alpha[j] * dphi[j] for j in (1, 2))
    psi0_X = sum(dalpha[j] * phi[j] for j in (1, 2))
    psi0_xx = sum(alpha[j] * d2phi[j] for j in (1, 2))
    psi0_xX = sum(dalpha[j] * dphi[j] for j in (1, 2))
    psi0_XX = sum(ddalpha[j] * phi[j] for j in (1, 2))

    psi1 = np.zeros_like(psi0)
    psi1_x = np.zeros_like(psi0)
    psi1_X = np.zeros_like(psi0)
    psi1_xx = np.zeros_like(psi0)
    psi1_xX = np.zeros_like(psi0)
    psi1_XX = np.zeros_like(psi0)
    for term in corrector.terms:
        key = (term.envelope_kind, term.j)
        u = eval_fourier(term.resolvent_coeffs, indices, x)
        du = eval_fourier(kvec * term.resolvent_coeffs, indices, x)
        d2u = eval_fourier(kvec**2 * term.resolvent_coeffs, indices, x)
        psi1 += u * g[key]
        psi1_x += du * g[key]
        psi1_X += u * dg[key]
        psi1_xx += d2u * g[key]
        psi1_xX += du * dg[key]
        psi1_XX += u * ddg[key]

    r = math.sqrt(delta)
    leading = r * psi0
    corr = r * delta * psi1
    values = leading + corr
    d1 = r * (psi0_x + delta * psi0_X) + r * delta * (psi1_x + delta * psi1_X)
    d2 = (
        r * (psi0_xx + 2.0 * delta * psi0_xX + delta**2 * psi0_XX)
        + r * delta * (psi1_xx + 2.0 * delta * psi1_xX + delta**2 * psi1_XX)
    )
    return AnsatzSample(x, delta, values, d1, d2, leading, corr)
