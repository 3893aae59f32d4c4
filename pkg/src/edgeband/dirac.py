"""Dirac point certification at k = pi and the perturbative gap formulas.

A certified point carries the degenerate pair (phi1, phi2 = inversion(phi1)),
the Fermi velocity lambda_sharp from its Fourier-coefficient formula, and the
gap coupling theta_sharp = <phi1, W phi2>.

Sign convention: the degenerate pair is ordered so that phi1 is the member
whose dominant plane-wave index is non-negative (for V = 0 this is the branch
through e^{i pi x} e^{2 pi i n x}).  With that normalization the certified
velocity is -2 pi (2n+1) at V = 0 for every n, and the branch through phi2
has measured slope equal to lambda_sharp including sign.  Only ratios and
magnitudes of (lambda_sharp, theta_sharp) enter physical observables.
"""
from __future__ import annotations


import math
from dataclasses import dataclass, replace

import numpy as np

from .bloch import (
    K_STAR,
    SECTOR_EVEN,
    SECTOR_ODD,
    BlochMode,
    bloch_spectrum,
    hill_matrix,
    inversion_map,
    parity_spectrum,
)
from .errors import NotDiracPointError
from .potentials import EVEN, ODD, CosineSeries

__all__ = [
    "DiracPointCertificate",
    "GapPrediction",
    "certify_dirac_point",
    "lambda_sharp",
    "theta_sharp",
    "with_coupling",
    "k0_splitting",
    "gap_edges_formula",
    "certificate_json_dict",
]


@dataclass(frozen=True, eq=False)
class DiracPointCertificate:
    """Certified linear band crossing (k = pi, E_star) for an even-index potential."""

    n: int
    E_star: float
    phi1: BlochMode
    phi2: BlochMode
    lambda_sharp: float
    theta_sharp: float | None
    degeneracy_residual: float
    slope_residual: float
    b_star: int
    M: int
    phi1_sector: str
    potential: CosineSeries

    @property
    def has_coupling(self) -> bool:
        return self.theta_sharp is not None


@dataclass(frozen=True)
class GapPrediction:
    """First-order essential-spectrum gap around a Dirac point."""

    delta: float
    kappa_inf: float
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("gap interval is empty the wrong way around")

    @classmethod
    def from_certificate(
        cls, cert: "DiracPointCertificate", delta: float, kappa_inf: float
    ) -> "GapPrediction":
        lo, hi = gap_edges_formula(cert, delta, kappa_inf, kprime=0.0)
        return cls(delta, kappa_inf, lo, hi)


def lambda_sharp(phi1: BlochMode) -> float:
    """Fermi velocity from Fourier coefficients: -2 pi (2 sum_m m |c(m)|^2 + 1).

    Requires a normalized mode at k = pi.
    """
    if abs(phi1.k - K_STAR) > 1e-12:
        raise ValueError("lambda_sharp is defined for k = pi modes")
    norm2 = float(np.sum(np.abs(phi1.coeffs) ** 2))
    if abs(norm2 - 1.0) > 1e-8:
        raise ValueError(f"mode not normalized: sum |c|^2 = {norm2}")
    msum = float(np.sum(phi1.indices * np.abs(phi1.coeffs) ** 2))
    return -2.0 * math.pi * (2.0 * msum + 1.0)


def theta_sharp(phi1: BlochMode, phi2: BlochMode, W: CosineSeries, imag_tol: float = 1e-12) -> float:
    """Gap coupling <phi1, W phi2> as an exact coefficient sum.

    W must be an odd-index series; Wh(+-p) = w_p / 2.  The inner product is
    real under the package phase convention (real coefficient vectors,
    phi2 = inversion(phi1)); a larger imaginary part signals a convention
    violation and raises.
    """
    if W.parity != ODD and W.harmonics:
        raise ValueError("theta_sharp requires an odd-index W")
    pos2 = {int(m): i for i, m in enumerate(phi2.indices)}
    total = 0.0j
    for p, w in W.harmonics:
        half = 0.5 * w
        for i, m in enumerate(phi1.indices):
            for mp in (int(m) - p, int(m) + p):
                j = pos2.get(mp)
                if j is not None:
                    total += half * np.conjugate(phi1.coeffs[i]) * phi2.coeffs[j]
    scale = max(1.0, abs(total))
    if abs(total.imag) > imag_tol * scale:
        raise ValueError(
            f"theta_sharp has imaginary part {total.imag:.3e}; phase convention violated"
        )
    return float(total.real)


def _matched_pair(V: CosineSeries, n: int, M: int) -> tuple[BlochMode, BlochMode, float]:
    """(n+1)-th even-sector mode, nearest odd-sector mode, |Delta E|."""
    even_modes = parity_spectrum(V, SECTOR_EVEN, M, n + 1)
    target = even_modes[n]
    odd_modes = parity_spectrum(V, SECTOR_ODD, M, min(n + 2, M))
    gaps = [abs(m.energy - target.energy) for m in odd_modes]
    partner = odd_modes[int(np.argmin(gaps))]
    return target, partner, float(min(gaps))


def _band_pair_index(V: CosineSeries, E_star: float, M: int) -> int:
    """1-based b_star with E_star = E_{b_star}(pi) = E_{b_star+1}(pi)."""
    evals = np.linalg.eigvalsh(hill_matrix(V, K_STAR, M))
    order = np.argsort(np.abs(evals - E_star))
    i, _ = sorted(order[:2])
    return int(i) + 1


def _branch_slope(V: CosineSeries, cert_phi2: BlochMode, b_star: int, M: int, dk: float) -> float:
    """Central-difference slope of the dispersion branch through phi2.

    At k = pi +- dk the crossing splits into bands (b_star, b_star+1); the
    branch is identified on each side by eigenvector overlap with phi2.
    """
    full_idx = np.arange(-M, M + 1)
    target = cert_phi2.embed(full_idx)
    picked = []
    for k in (K_STAR - dk, K_STAR + dk):
        modes = bloch_spectrum(V, k, M, b_star + 1)
        pair = modes[b_star - 1: b_star + 1]
        overlaps = [abs(np.vdot(m.coeffs, target)) for m in pair]
        picked.append(pair[int(np.argmax(overlaps))].energy)
    return (picked[1] - picked[0]) / (2.0 * dk)


def certify_dirac_point(
    V: CosineSeries,
    n: int,
    M: int,
    tol: float = 1e-8,
    W: CosineSeries | None = None,
    slope_dk: float = 1e-4,
    slope_tol: float = 1e-3,
    lambda_floor: float = 1e-8,
) -> DiracPointCertificate:
    """Certify the n-th candidate Dirac point of -d^2/dx^2 + V at k = pi.

    Checks, numerically, the three sufficient conditions: the (n+1)-th
    even-sector and matching odd-sector eigenvalues agree to ``tol`` relative
    (conditions I and II: simple sector eigenvalues forming a double k = pi
    eigenvalue), the Fourier-formula velocity is bounded away from zero
    (condition III), and the measured branch slope through phi2 matches the
    formula to ``slope_tol`` relative (linear crossing).

    Raises NotDiracPointError when any condition fails.
    """
    if V.parity != EVEN:
        raise ValueError("certification requires an even-index potential")
    if n < 0:
        raise ValueError("n must be >= 0")
    even_mode, odd_mode, d_res = _matched_pair(V, n, M)
    E_star = 0.5 * (even_mode.energy + odd_mode.energy)
    if d_res > tol * max(1.0, abs(E_star)):
        raise NotDiracPointError(
            f"not a Dirac point at this tolerance: |E_even - E_odd| = {d_res:.3e} "
            f"> {tol:.1e} * {max(1.0, abs(E_star)):.3e}"
        )
    # Branch normalization: phi1 = member with dominant index >= 0.
    phi1 = even_mode
    if phi1.dominant_index() < 0:
        phi1 = inversion_map(even_mode)
        sector = SECTOR_ODD
    else:
        sector = SECTOR_EVEN
    phi2 = inversion_map(phi1)
    lam = lambda_sharp(phi1)
    if abs(lam) < lambda_floor:
        raise NotDiracPointError(f"non-degeneracy failure: lambda_sharp = {lam:.3e} ~ 0")
    b_star = _band_pair_index(V, E_star, M)
    slope = _branch_slope(V, phi2, b_star, M, slope_dk)
    slope_res = abs(slope - lam) / abs(lam)
    if slope_res > slope_tol:
        raise NotDiracPointError(
            f"linear-crossing check failed: measured slope {slope:.6e} vs "
            f"lambda_sharp {lam:.6e} (relative residual {slope_res:.3e})"
        )
    theta = theta_sharp(phi1, phi2, W) if W is not None else None
    return DiracPointCertificate(
        n=n,
        E_star=E_star,
        phi1=phi1,
        phi2=phi2,
        lambda_sharp=lam,
        theta_sharp=theta,
        degeneracy_residual=d_res,
        slope_residual=slope_res,
        b_star=b_star,
        M=M,
        phi1_sector=sector,
        potential=V,
    )


def with_coupling(cert: DiracPointCertificate, W: CosineSeries) -> DiracPointCertificate:
    """Certificate with theta_sharp filled in for the odd-index coupling W."""
    return replace(cert, theta_sharp=theta_sharp(cert.phi1, cert.phi2, W))


def certify_sweep(
    V: CosineSeries,
    n: int,
    M: int,
    eps_list,
    tol: float = 1e-8,
    W: CosineSeries | None = None,
) -> list[tuple[float, DiracPointCertificate | None, str]]:
    """Re-run certification of -d^2 + eps V per coupling strength.

    Returns (eps, certificate-or-None, message) triples; failures are
    reported rather than raised, so an exceptional set of couplings shows up
    empirically as gaps in the sweep.
    """
    out = []
    for eps in eps_list:
        try:
            cert = certify_dirac_point(V.scaled(float(eps)), n, M, tol=tol, W=W)
            out.append((float(eps), cert, "ok"))
        except NotDiracPointError as exc:
            out.append((float(eps), None, str(exc)))
    return out


def k0_splitting(
    V: CosineSeries, n: int, eps: float, M: int
) -> tuple[float, float, tuple[float, float]]:
    """k = 0 degeneracy lifting of eps*V near (2 n pi)^2.

    Returns (E_minus, E_plus, perturbative) where the numeric pair are the two
    eigenvalues of the k = 0 problem nearest (2 n pi)^2 and the perturbative
    pair is (2 n pi)^2 + eps (v0 -+ v_{2n}/2): the cross matrix element of the
    cosine harmonic between e^{+-2 pi i n x} is half its coefficient, so the
    first-order splitting is eps |v_{2n}| and the residual is O(eps^2).
    Raises when the numeric pair is not separated from neighboring bands.
    """
    if n < 1:
        raise ValueError("k = 0 splitting needs n >= 1")
    E0 = (2.0 * n * math.pi) ** 2
    n_bands = min(2 * n + 4, 2 * M + 1)
    modes = bloch_spectrum(V.scaled(eps), 0.0, M, n_bands)
    evals = np.array([m.energy for m in modes])
    order = np.argsort(np.abs(evals - E0))
    i, j = sorted(order[:2])
    pair = np.sort(evals[[i, j]])
    others = np.delete(evals, [i, j])
    margin = float(np.min(np.abs(others[:, None] - pair[None, :]))) if others.size else np.inf
    spread = pair[1] - pair[0]
    if margin < 2.0 * max(spread, 1e-12):
        raise NotDiracPointError(
            f"k = 0 pair not separable from neighbors at eps={eps}: margin {margin:.3e}"
        )
    v0 = V.constant_term
    v2n = V.coefficient(2 * n)
    pert = (E0 + eps * (v0 - 0.5 * v2n), E0 + eps * (v0 + 0.5 * v2n))
    return float(pair[0]), float(pair[1]), pert


def gap_edges_formula(
    cert: DiracPointCertificate, delta: float, kappa_inf: float, kprime: float = 0.0
) -> tuple[float, float]:
    """Perturbative band edges E_star -+ sqrt(delta^2 kappa^2 theta^2 + k'^2 lambda^2).

    Valid for |kprime| < delta when delta > 0; at delta = 0 it degenerates to
    the bare linear crossing E_star +- |kprime lambda_sharp|.
    """
    if cert.theta_sharp is None:
        raise ValueError("certificate has no theta_sharp; call with_coupling first")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if delta > 0 and abs(kprime) >= delta:
        raise ValueError(f"|kprime|={abs(kprime)} outside the validity window (< delta={delta})")
    r = math.sqrt(
        (delta * kappa_inf * cert.theta_sharp) ** 2 + (kprime * cert.lambda_sharp) ** 2
    )
    return cert.E_star - r, cert.E_star + r


def certificate_json_dict(cert: DiracPointCertificate) -> dict:
    """JSON-ready certificate dump."""
    return {
        "n": cert.n,
        "E_star": cert.E_star,
        "lambda_sharp": cert.lambda_sharp,
        "theta_sharp": cert.theta_sharp,
        "degeneracy_residual": cert.degeneracy_residual,
        "slope_residual": cert.slope_residual,
        "coeffs_phi1": [
            [int(m), float(c.real), float(c.imag)]
            for m, c in zip(cert.phi1.indices, cert.phi1.coeffs)
        ],
    }
