"""Direct real-space eigenvalue solver for H_delta = -d^2/dx^2 + V + delta kappa(delta x) W.

Dirichlet truncation on [-L, L] (a periodic supercell would force a second,
spurious domain wall), second-order centered differences, and the symmetric
tridiagonal Sturm/bisection/inverse-iteration stack from ``tridiag``.  Gap
windows come from the numerically computed bands of the asymptotic periodic
operator H_{delta,+}; the closed-form gap prediction is a cross-check only.

Reported in-gap eigenvalues are Richardson-extrapolated from the h and h/2
grids; raw grid values are retained on the eigenpair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import band_sweep
from .dirac import DiracPointCertificate
from .errors import ConvergenceError, NoGapError
from .multiscale import AnsatzSample
from .potentials import CosineSeries, DomainWall
from .tridiag import eigenvalues_in_interval, inverse_iteration

__all__ = [
    "RealSpaceGrid",
    "TridiagonalOperator",
    "EdgeEigenpair",
    "PointRecord",
    "BifurcationDiagram",
    "build_operator",
    "eigenpairs_in_window",
    "essential_gap",
    "fd_band_gap",
    "find_edge_states",
    "bifurcation_sweep",
    "h2_discrepancy",
    "write_bifurcation_csv",
    "write_eigenvector_csv",
]

DEFAULT_H = 1.0 / 64.0


@dataclass(frozen=True)
class RealSpaceGrid:
    """Uniform Dirichlet grid: N interior points on (-L, L), spacing h."""

    L: float
    h: float
    N: int

    def __post_init__(self):
        if self.h > 1.0 / 32.0 + 1e-15:
            raise ValueError("h must be <= 1/32 to resolve the period-1 potential")
        if abs((self.N + 1) * self.h - 2.0 * self.L) > 1e-9:
            raise ValueError("grid does not satisfy (N+1) h = 2L")

    @classmethod
    def build(cls, L: float, h: float = DEFAULT_H) -> "RealSpaceGrid":
        n_half = max(1, math.ceil(L / h - 1e-12))
        L_snap = n_half * h
        return cls(L_snap, h, 2 * n_half - 1)

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.h * np.arange(1, self.N + 1)

    def refined(self) -> "RealSpaceGrid":
        """Nested half-spacing grid with the same endpoints."""
        return RealSpaceGrid(self.L, self.h / 2.0, 2 * self.N + 1)


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Symmetric FD discretization: diag 2/h^2 + U(x_i), off-diagonal -1/h^2."""

    diag: np.ndarray
    offdiag: float
    grid: RealSpaceGrid

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out


def build_operator(
    V: CosineSeries, W: CosineSeries, wall: DomainWall, delta: float, grid: RealSpaceGrid
) -> TridiagonalOperator:
    x = grid.x
    U = V.evaluate(x)
    if delta > 0.0:
        U = U + delta * wall.evaluate(delta * x) * W.evaluate(x)
    return TridiagonalOperator(2.0 / grid.h**2 + U, -1.0 / grid.h**2, grid)


def eigenpairs_in_window(
    T: TridiagonalOperator,
    window: tuple[float, float],
    tol: float = 1e-12,
    max_count: int = 64,
) -> list[tuple[float, np.ndarray]]:
    """All eigenpairs of T in the open window, sorted ascending.

    Eigenvalues by Sturm-count bisection to ``tol`` absolute; eigenvectors by
    inverse iteration, normalized in the h-weighted discrete L2 norm.
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy lower < upper")
    off = np.full(T.grid.N - 1, T.offdiag)
    evals = eigenvalues_in_interval(T.diag, off, lo, hi, tol=tol, max_count=max_count)
    pairs = []
    for E in evals:
        v, rayleigh = inverse_iteration(T.diag, off, E)
        psi = v / math.sqrt(T.grid.h)        # h * sum psi^2 = 1
        if psi[np.argmax(np.abs(psi))] < 0:
            psi = -psi
        pairs.append((float(rayleigh), psi))
    pairs.sort(key=lambda p: p[0])
    return pairs


def essential_gap(
    V: CosineSeries,
    W: CosineSeries,
    wall: DomainWall,
    delta: float,
    cert: DiracPointCertificate,
    M: int | None = None,
    k_samples: int = 33,
) -> tuple[float, float]:
    """Measured spectral gap of H_{delta,+} = -d^2 + V + delta kappa_inf W around E_star.

    The gap is (max_k E_{b*}(k), min_k E_{b*+1}(k)) from the swept bands; by
    the half-period symmetry of W this equals the H_{delta,-} gap.  Raises
    NoGapError when the bands touch or overlap.
    """
    Q = V + W.scaled(delta * wall.kappa_plus)
    if M is None:
        M = max(cert.M, Q.max_harmonic + 2)
    bs = band_sweep(Q, k_samples, M, cert.b_star + 1)
    lower = float(np.max(bs.bands[:, cert.b_star - 1]))
    upper = float(np.min(bs.bands[:, cert.b_star]))
    if not lower < upper:
        raise NoGapError(f"bands overlap at delta={delta}: [{lower}, {upper}]")
    return lower, upper


def fd_band_gap(
    V: CosineSeries,
    W: CosineSeries,
    wall: DomainWall,
    delta: float,
    h: float,
    b_star: int,
    k_samples: int = 33,
) -> tuple[float, float]:
    """Gap of the FD-discretized asymptotic operator H_{delta,+} on the h-lattice.

    The truncated real-space operator inherits the dispersion error of the
    second-order stencil (eigenvalues shifted by about -k^4 h^2/12), which for
    higher bands exceeds the gap width itself.  Search windows for in-gap
    states must therefore come from the discrete Bloch bands: a unit cell of
    q = 1/h points with phase-twisted wraparound, swept over the Brillouin
    zone.  Raises NoGapError when the discrete bands overlap.
    """
    q = round(1.0 / h)
    if abs(q * h - 1.0) > 1e-12:
        raise ValueError("1/h must be an integer so the lattice is commensurate")
    xj = h * np.arange(q)
    U = V.evaluate(xj) + delta * wall.kappa_plus * W.evaluate(xj)
    ks = np.linspace(0.0, 2.0 * np.pi, k_samples)
    if not np.any(np.isclose(ks, np.pi, atol=1e-14)):
        ks = np.sort(np.append(ks, np.pi))
    lower = -np.inf
    upper = np.inf
    base = np.diag(2.0 / h**2 + U) + np.diag(np.full(q - 1, -1.0 / h**2), 1) + np.diag(
        np.full(q - 1, -1.0 / h**2), -1
    )
    for k in ks:
        Hk = base.astype(complex)
        Hk[0, -1] += -np.exp(-1j * k) / h**2
        Hk[-1, 0] += -np.exp(1j * k) / h**2
        ev = np.linalg.eigvalsh(Hk)
        lower = max(lower, float(ev[b_star - 1]))
        upper = min(upper, float(ev[b_star]))
    if not lower < upper:
        raise NoGapError(f"discrete bands overlap at h={h}, delta={delta}")
    return lower, upper


@dataclass(frozen=True, eq=False)
class EdgeEigenpair:
    """Mid-gap eigenpair of the truncated H_delta with its diagnostics."""

    energy: float              # Richardson-extrapolated
    energy_h: float            # raw value on the h grid
    energy_h2: float           # raw value on the h/2 grid
    psi: np.ndarray            # h-grid eigenvector, h-weighted L2-normalized
    grid: RealSpaceGrid
    gap: tuple[float, float]
    residual: float
    boundary_leak: float


def _auto_half_length(cert: DiracPointCertificate, wall: DomainWall, delta: float) -> float:
    theta = cert.theta_sharp
    if theta in (None, 0.0):
        raise ValueError("auto grid sizing needs a certificate with nonzero theta_sharp")
    kappa_slow = min(abs(wall.kappa_plus), abs(wall.kappa_minus))
    if kappa_slow == 0.0:
        raise ValueError("auto grid sizing needs nonzero wall limits")
    rate = delta * abs(theta * kappa_slow / cert.lambda_sharp)
    return max(30.0 / rate, 20.0)


def _classified_pairs(
    T: TridiagonalOperator,
    window: tuple[float, float],
    leak_tol: float,
    artifact_tol: float = 1e-2,
):
    """Window eigenpairs split into genuine wall states and boundary artifacts.

    Dirichlet truncation spawns Tamm-like surface states pinned to the
    artificial ends; their amplitude peaks in the boundary neighborhoods, so a
    relative-leak test (edge amplitude / peak amplitude) separates them from
    wall-localized states.  A state that is neither clean nor clearly a
    boundary artifact signals an under-sized domain and requests a retry.
    """
    pairs = eigenpairs_in_window(T, window)
    n_edge = max(2, T.grid.N // 200)
    accepted = []
    needs_retry = False
    for E, psi in pairs:
        edge_amp = float(max(np.max(np.abs(psi[:n_edge])), np.max(np.abs(psi[-n_edge:]))))
        peak = float(np.max(np.abs(psi)))
        if edge_amp > artifact_tol * peak:
            continue          # truncation surface state, not an edge state
        if edge_amp > leak_tol:
            needs_retry = True
        accepted.append((E, psi, edge_amp))
    return accepted, needs_retry


def find_edge_states(
    V: CosineSeries,
    W: CosineSeries,
    wall: DomainWall,
    delta: float,
    cert: DiracPointCertificate,
    h: float = DEFAULT_H,
    L: float | None = None,
    gap: tuple[float, float] | None = None,
    window_shrink: float = 0.01,
    leak_tol: float = 1e-8,
) -> list[EdgeEigenpair]:
    """All eigenpairs of the truncated H_delta strictly inside the measured gap.

    The window is the measured gap shrunk by ``window_shrink`` of its width on
    each side (band-edge resonances excluded).  The half-length defaults to
    30 / (delta |theta kappa_inf / lambda|).  Truncation surface states pinned
    to the Dirichlet ends are discarded; a wall state whose boundary leak
    still exceeds ``leak_tol`` triggers one retry on a doubled domain before
    failing.  An empty result is valid (no in-gap state).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if gap is None:
        gap = essential_gap(V, W, wall, delta, cert)

    def shrunk(g: tuple[float, float]) -> tuple[float, float]:
        w = g[1] - g[0]
        return g[0] + window_shrink * w, g[1] - window_shrink * w

    # Search windows must follow the discrete bands, whose dispersion error
    # can displace the gap by more than its own width for higher crossings.
    window_h = shrunk(fd_band_gap(V, W, wall, delta, h, cert.b_star))
    window_h2 = shrunk(fd_band_gap(V, W, wall, delta, h / 2.0, cert.b_star))
    half_L = L if L is not None else _auto_half_length(cert, wall, delta)

    for attempt in range(2):
        grid = RealSpaceGrid.build(half_L, h)
        T = build_operator(V, W, wall, delta, grid)
        pairs_h, retry_h = _classified_pairs(T, window_h, leak_tol)
        grid2 = grid.refined()
        T2 = build_operator(V, W, wall, delta, grid2)
        pairs_h2, retry_h2 = _classified_pairs(T2, window_h2, leak_tol)

        if retry_h or retry_h2:
            if attempt == 0:
                half_L *= 2.0
                continue
            worst = max(p[2] for p in pairs_h + pairs_h2)
            raise ConvergenceError(
                f"boundary leak {worst:.3e} > {leak_tol:.1e} even after enlarging L to {half_L}"
            )
        out = []
        fine_energies = np.array([p[0] for p in pairs_h2])
        same_count = len(pairs_h2) == len(pairs_h)
        for rank, (E_h, psi, leak) in enumerate(pairs_h):
            if same_count:
                E_h2 = float(fine_energies[rank])       # windows differ by the FD
                E_rich = (4.0 * E_h2 - E_h) / 3.0       # shift, so match by rank
            elif fine_energies.size:
                j = int(np.argmin(np.abs(fine_energies - E_h)))
                E_h2 = float(fine_energies[j])
                E_rich = (4.0 * E_h2 - E_h) / 3.0
            else:
                E_h2 = E_h
                E_rich = E_h
            if not gap[0] < E_rich < gap[1]:
                continue   # misconverged at this h: not a certified in-gap state
            v = psi * math.sqrt(grid.h)   # back to unit 2-norm for the residual
            res = float(np.linalg.norm(T.apply(v) - E_h * v))
            out.append(
                EdgeEigenpair(
                    energy=float(E_rich),
                    energy_h=float(E_h),
                    energy_h2=E_h2,
                    psi=psi,
                    grid=grid,
                    gap=gap,
                    residual=res,
                    boundary_leak=leak,
                )
            )
        return out
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class PointRecord:
    """One (delta, Dirac point) entry of a bifurcation sweep."""

    delta: float
    point_index: int
    gap: tuple[float, float] | None
    energies: tuple[float, ...]
    theta_flagged: bool        # True: theta_sharp ~ 0, no first-order gap prediction
    window: tuple[float, float] | None


@dataclass(frozen=True)
class BifurcationDiagram:
    """Gap edges and in-gap energies per delta and per tracked Dirac point."""

    delta_values: tuple[float, ...]
    records: tuple[PointRecord, ...]

    def for_point(self, point_index: int) -> list[PointRecord]:
        return [r for r in self.records if r.point_index == point_index]


def bifurcation_sweep(
    V: CosineSeries,
    W: CosineSeries,
    wall: DomainWall,
    delta_list: list[float],
    certs: list[DiracPointCertificate],
    h: float = DEFAULT_H,
    L: float | None = None,
    theta_tol: float = 1e-10,
) -> BifurcationDiagram:
    """Sweep delta over the tracked Dirac points, recording gaps and in-gap states.

    Points with theta_sharp below ``theta_tol`` are flagged (no first-order
    gap prediction); for those an exploratory window of width delta^{3/2}
    around E_star, intersected with whatever gap the bands expose, is scanned
    instead of the gap interior.
    """
    deltas = [float(d) for d in delta_list]
    if deltas != sorted(deltas) or any(d <= 0 for d in deltas):
        raise ValueError("delta_list must be ascending and positive")
    records = []
    for d in deltas:
        for idx, cert in enumerate(certs):
            theta = cert.theta_sharp
            if theta is None:
                raise ValueError("bifurcation_sweep needs certificates with theta_sharp set")
            flagged = abs(theta) <= theta_tol
            try:
                gap = essential_gap(V, W, wall, d, cert)
            except NoGapError:
                gap = None
            if not flagged and gap is not None:
                states = find_edge_states(V, W, wall, d, cert, h=h, L=L, gap=gap)
                records.append(
                    PointRecord(d, idx, gap, tuple(s.energy for s in states), False, gap)
                )
                continue
            # Exploratory scan around E_star for flagged or gapless points,
            # centered on the discrete gap (the stencil shifts it bodily).
            half_w = 0.5 * d**1.5
            try:
                fd_gap = fd_band_gap(V, W, wall, d, h, cert.b_star)
            except NoGapError:
                fd_gap = None
            if fd_gap is not None:
                center = 0.5 * (fd_gap[0] + fd_gap[1])
                width = fd_gap[1] - fd_gap[0]
                window = (
                    max(center - half_w, fd_gap[0] + 0.01 * width),
                    min(center + half_w, fd_gap[1] - 0.01 * width),
                )
            else:
                window = (cert.E_star, cert.E_star)  # nothing to scan
            energies: tuple[float, ...] = ()
            if window[0] < window[1]:
                half_L = L if L is not None else min(
                    4000.0, 30.0 * abs(cert.lambda_sharp) / (wall.kappa_plus * d**1.5)
                )
                grid = RealSpaceGrid.build(half_L, h)
                T = build_operator(V, W, wall, d, grid)
                accepted, _ = _classified_pairs(T, window, leak_tol=np.inf)
                energies = tuple(E for E, _, _ in accepted)
            records.append(PointRecord(d, idx, gap, energies, flagged, window))
    return BifurcationDiagram(tuple(deltas), tuple(records))


def _h2_norm(d: np.ndarray, h: float) -> float:
    n0 = h * float(np.sum(np.abs(d) ** 2))
    d1 = (d[2:] - d[:-2]) / (2.0 * h)
    n1 = h * float(np.sum(np.abs(d1) ** 2))
    d2 = (d[2:] - 2.0 * d[1:-1] + d[:-2]) / h**2
    n2 = h * float(np.sum(np.abs(d2) ** 2))
    return math.sqrt(n0 + n1 + n2)


def h2_discrepancy(pair: EdgeEigenpair, ansatz: AnsatzSample) -> float:
    """Discrete H2 distance between the computed eigenvector and delta^{1/2} psi0.

    The eigenvector is rescaled to the leading term's norm and the global
    phase aligned by maximizing the real part of their inner product; the
    comparison deliberately excludes the corrector term.
    """
    x = pair.grid.x
    if len(ansatz.x) != len(x) or abs(ansatz.x[0] - x[0]) > 1e-9:
        raise ValueError("ansatz must be sampled on the eigenpair's grid")
    h = pair.grid.h
    target = ansatz.leading
    t_norm = math.sqrt(h * float(np.sum(np.abs(target) ** 2)))
    psi = pair.psi.astype(complex) * t_norm     # pair.psi has unit h-weighted norm
    z = h * complex(np.vdot(target, psi))
    if abs(z) < 1e-8 * t_norm**2:
        raise ValueError(
            "phase alignment degenerate: eigenvector nearly orthogonal to the "
            "ansatz (wrong branch pairing?)"
        )
    psi *= np.conj(z) / abs(z)
    return _h2_norm(psi - target, h)


def write_bifurcation_csv(diagram: BifurcationDiagram, path: str) -> None:
    """CSV: delta, point_index, gap_lower, gap_upper, E_edge (blank if none)."""
    with open(path, "w") as fh:
        fh.write("delta,point_index,gap_lower,gap_upper,E_edge\n")
        for r in diagram.records:
            glo = format(r.gap[0], ".17g") if r.gap else ""
            ghi = format(r.gap[1], ".17g") if r.gap else ""
            if r.energies:
                for E in r.energies:
                    fh.write(
                        f"{format(r.delta, '.17g')},{r.point_index},{glo},{ghi},"
                        f"{format(E, '.17g')}\n"
                    )
            else:
                fh.write(f"{format(r.delta, '.17g')},{r.point_index},{glo},{ghi},\n")


def write_eigenvector_csv(pair: EdgeEigenpair, path: str) -> None:
    """CSV dump of the eigenvector: x, psi."""
    with open(path, "w") as fh:
        fh.write("x,psi\n")
        for x, p in zip(pair.grid.x, pair.psi):
            fh.write(f"{format(x, '.17g')},{format(p, '.17g')}\n")
