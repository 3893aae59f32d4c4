"""Effective Dirac operator: zero mode, squared spectrum, topological stability."""
import math

import numpy as np
import pytest

from edgeband.dirac1d import (
    BRANCH_MINUS,
    BRANCH_PLUS,
    CompactBump,
    DiracSpec,
    dirac_squared_spectrum,
    essential_edge,
    stability_probe,
    topological_branch,
    write_zero_mode_csv,
    zero_mode,
)
from edgeband.errors import NoZeroModeError
from edgeband.potentials import DomainWall

TANH = DomainWall.tanh(1.0)


def test_zero_mode_sech_case():
    spec = DiracSpec(1.0, 1.0, TANH)
    zm = zero_mode(spec, X_max=30.0, N=4096)
    assert zm.branch == BRANCH_PLUS
    i0 = len(zm.X) // 2
    assert zm.X[i0] == 0.0
    assert zm.comp1[i0] == pytest.approx(0.5, abs=1e-8)    # gamma0 = 1/2
    # alpha = (1/2)(1, i) sech X
    expected = 0.5 / np.cosh(zm.X)
    assert np.max(np.abs(zm.comp1 - expected)) < 1e-7
    assert np.max(np.abs(zm.comp2 - 1j * expected)) < 1e-7
    ratio = zm.comp2[i0] / zm.comp1[i0]
    assert abs(ratio - 1j) < 1e-12


def test_zero_mode_negative_velocity_branch():
    spec = DiracSpec(-2 * math.pi, 1.0, TANH)
    zm = zero_mode(spec)
    assert zm.branch == BRANCH_MINUS
    # envelope (cosh X)^{-1/(2 pi)}
    probe = 3.7
    assert zm.envelope(probe)[0] == pytest.approx(
        math.cosh(probe) ** (-1.0 / (2 * math.pi)), rel=1e-4
    )
    ratio = zm.comp2[100] / zm.comp1[100]
    assert abs(ratio + 1j) < 1e-12


def test_zero_mode_normalization_and_check():
    spec = DiracSpec(1.0, 2.0, DomainWall.scaled_tanh(1.5, 0.7))
    zm = zero_mode(spec)
    h = zm.X[1] - zm.X[0]
    norm2 = h * np.sum(np.abs(zm.comp1) ** 2 + np.abs(zm.comp2) ** 2)
    assert norm2 == pytest.approx(1.0, abs=1e-6)
    assert zm.norm_check < 1e-6


def test_zero_mode_coarse_grid_error():
    from edgeband.errors import GridError

    with pytest.raises(GridError):
        zero_mode(DiracSpec(1.0, 1.0, TANH), X_max=10.0, N=64)


def test_zero_mode_rejects_sign_definite_wall():
    with pytest.raises(NoZeroModeError):
        zero_mode(DiracSpec(1.0, 1.0, DomainWall.constant(1.0)))
    with pytest.raises(NoZeroModeError):
        zero_mode(DiracSpec(1.0, 0.0, TANH))


def test_zero_mode_fd_dirac_residual():
    spec = DiracSpec(1.0, 1.0, TANH)
    zm = zero_mode(spec, X_max=30.0, N=4096)
    X, h = zm.X, zm.X[1] - zm.X[0]
    kap = TANH.evaluate(X[1:-1])
    d1 = (zm.comp1[2:] - zm.comp1[:-2]) / (2 * h)
    d2 = (zm.comp2[2:] - zm.comp2[:-2]) / (2 * h)
    r1 = 1j * spec.lam * d1 + spec.theta * kap * zm.comp2[1:-1]
    r2 = -1j * spec.lam * d2 + spec.theta * kap * zm.comp1[1:-1]
    res = math.sqrt(h * np.sum(np.abs(r1) ** 2 + np.abs(r2) ** 2))
    assert res < 1e-4


def test_zero_mode_exponential_decay_slope():
    spec = DiracSpec(-2 * math.pi, 1.0, TANH)
    zm = zero_mode(spec)
    X = zm.X
    mask = (X >= 0.5 * X[-1]) & (X <= 0.9 * X[-1])
    slope = np.polyfit(X[mask], np.log(np.abs(zm.comp1[mask])), 1)[0]
    expected = -abs(spec.theta * 1.0 / spec.lam)
    assert slope == pytest.approx(expected, rel=0.02)


def test_essential_edge():
    assert essential_edge(DiracSpec(1.0, 2.0, TANH)) == pytest.approx(2.0)
    assert essential_edge(DiracSpec(1.0, 0.0, TANH)) == 0.0
    asym = DomainWall.tabulated(
        np.linspace(-30, 30, 601), 2.0 + np.tanh(np.linspace(-30, 30, 601)),
        kappa_plus=3.0, kappa_minus=1.0, threshold=30.0,
    )
    assert essential_edge(DiracSpec(1.0, 1.0, asym)) == pytest.approx(1.0)


def test_dirac_squared_sech_spectrum():
    spec = DiracSpec(1.0, 1.0, TANH)
    ep, em = dirac_squared_spectrum(spec, X_max=30.0, N=4096, n_eigs=3)
    assert abs(em[0]) < 1e-6                # topological zero of H_-
    assert em[0] > -1e-10                   # D^2 >= 0
    assert ep[0] > 1.0 - 1e-3               # H_+ has nothing below the edge
    # above the gap edge the two squared spectra agree within discretization
    assert abs(ep[0] - em[1]) < 2e-3


def test_dirac_squared_constant_wall():
    spec = DiracSpec(1.0, 1.5, DomainWall.constant(2.0))
    ep, em = dirac_squared_spectrum(spec, X_max=20.0, N=2048, n_eigs=1)
    expected = (1.5 * 2.0) ** 2
    assert ep[0] == pytest.approx(expected, rel=1e-3)
    assert em[0] == pytest.approx(expected, rel=1e-3)


def test_topological_branch_selection():
    assert topological_branch(DiracSpec(1.0, 1.0, TANH)) == -1
    assert topological_branch(DiracSpec(-1.0, 1.0, TANH)) == +1


def test_stability_probe_zero_bump():
    spec = DiracSpec(1.0, 1.0, TANH)
    base = dirac_squared_spectrum(spec, X_max=30.0, N=2048, n_eigs=1)[1][0]
    probed = stability_probe(spec, CompactBump.zero(), X_max=30.0, N=2048)
    assert probed == pytest.approx(base, abs=1e-12)


def test_stability_probe_bump_keeps_zero():
    spec = DiracSpec(1.0, 1.0, TANH)
    bump = CompactBump.smoothed_indicator(-2.0, 2.0, 0.5)
    assert abs(stability_probe(spec, bump, X_max=30.0, N=4096)) < 1e-5


def test_bump_asymptote_guard():
    with pytest.raises(ValueError):
        CompactBump(np.array([-2.0, 0.0, 2.0]), np.array([0.5, 1.0, 0.5]))


def test_dirac_squared_grid_nonconvergence():
    from edgeband.errors import ConvergenceError

    spec = DiracSpec(1.0, 1.0, TANH)
    with pytest.raises(ConvergenceError):
        dirac_squared_spectrum(spec, X_max=30.0, N=64, n_eigs=2, conv_tol=1e-9)


def test_zero_mode_csv(tmp_path):
    zm = zero_mode(DiracSpec(1.0, 1.0, TANH), X_max=10.0, N=512)
    path = tmp_path / "zm.csv"
    write_zero_mode_csv(zm, str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "X,re_alpha1,im_alpha1,re_alpha2,im_alpha2"
    assert len(lines) == len(zm.X) + 1
