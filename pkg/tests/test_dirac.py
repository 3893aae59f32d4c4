"""Dirac point certification, velocity/coupling formulas, perturbative gaps."""
import math

import numpy as np
import pytest

from edgeband.bloch import BlochMode, inversion_map, parity_spectrum
from edgeband.dirac import (
    certificate_json_dict,
    certify_dirac_point,
    gap_edges_formula,
    k0_splitting,
    lambda_sharp,
    theta_sharp,
    with_coupling,
)
from edgeband.errors import NotDiracPointError
from edgeband.potentials import CosineSeries

V0 = CosineSeries.zero()
V10 = CosineSeries.even([(2, 10.0)])
W135 = CosineSeries.odd([(1, 2.0), (3, 2.0), (5, 2.0)])
W1 = CosineSeries.odd([(1, 2.0)])


def _delta_mode(m, M=8):
    indices = np.arange(-M, M + 1)
    coeffs = np.zeros(len(indices), dtype=complex)
    coeffs[indices.tolist().index(m)] = 1.0
    return BlochMode(math.pi, 1, (math.pi + 2 * math.pi * m) ** 2, coeffs, indices)


def test_lambda_sharp_formula_values():
    assert lambda_sharp(_delta_mode(0)) == pytest.approx(-2 * math.pi, rel=1e-15)
    assert lambda_sharp(_delta_mode(2)) == pytest.approx(-10 * math.pi, rel=1e-15)
    indices = np.arange(-8, 9)
    coeffs = np.zeros(17, dtype=complex)
    coeffs[indices.tolist().index(0)] = 1 / math.sqrt(2)
    coeffs[indices.tolist().index(-2)] = 1 / math.sqrt(2)
    mixed = BlochMode(math.pi, 1, 0.0, coeffs, indices)
    assert lambda_sharp(mixed) == pytest.approx(2 * math.pi, rel=1e-12)


def test_lambda_sharp_requires_normalization():
    mode = _delta_mode(0)
    bad = BlochMode(mode.k, 1, mode.energy, 2.0 * mode.coeffs, mode.indices)
    with pytest.raises(ValueError):
        lambda_sharp(bad)


def test_lambda_sharp_antisymmetry_under_inversion():
    phi1 = parity_spectrum(V10, "even-index", 20, 1)[0]
    phi2 = inversion_map(phi1)
    assert lambda_sharp(phi2) == pytest.approx(-lambda_sharp(phi1), rel=1e-12)


def test_certify_free_chain():
    for n, sector in ((0, "even-index"), (1, "odd-index"), (2, "even-index")):
        cert = certify_dirac_point(V0, n, 16, W=W135)
        assert cert.E_star == pytest.approx((2 * n + 1) ** 2 * math.pi**2, rel=1e-14)
        assert cert.lambda_sharp == pytest.approx(-2 * math.pi * (2 * n + 1), abs=1e-10)
        assert cert.theta_sharp == pytest.approx(1.0, abs=1e-12)
        assert cert.degeneracy_residual < 1e-12
        assert cert.slope_residual < 1e-3
        assert cert.phi1_sector == sector
        assert cert.b_star == 2 * n + 1


def test_certify_strong_coupling():
    cert = certify_dirac_point(V10, 0, 24, W=W135)
    assert cert.E_star == pytest.approx(9.45, abs=0.05)
    assert cert.slope_residual < 1e-3
    # phi2 is the inversion image of phi1
    expected = inversion_map(cert.phi1)
    assert np.max(np.abs(cert.phi2.embed(expected.indices) - expected.coeffs)) < 1e-14
    # second crossing sits near (3 pi)^2 and normalizes through the odd sector
    cert1 = certify_dirac_point(V10, 1, 24, W=W135)
    assert cert1.E_star == pytest.approx(9 * math.pi**2, rel=0.01)
    assert cert1.lambda_sharp == pytest.approx(-6 * math.pi, rel=0.01)
    assert cert1.phi1_sector == "odd-index"
    assert cert1.slope_residual < 1e-3


def test_certify_error_paths():
    # Inversion symmetry makes the sector degeneracy structurally exact, so
    # the |Delta E| gate only trips at the eigensolver's noise floor; pick a
    # case whose sector solves disagree by a few ulps and an impossible tol.
    with pytest.raises(NotDiracPointError):
        certify_dirac_point(CosineSeries.even([(2, 37.5)]), 1, 20, tol=1e-18)
    with pytest.raises(NotDiracPointError):
        certify_dirac_point(V0, 0, 16, lambda_floor=1e9)
    with pytest.raises(ValueError):
        certify_dirac_point(CosineSeries.odd([(1, 1.0)]), 0, 16)


def test_theta_sharp_values_and_dropout():
    cert = certify_dirac_point(V0, 0, 16)
    assert theta_sharp(cert.phi1, cert.phi2, W1) == pytest.approx(1.0, abs=1e-14)
    w_no_match = CosineSeries.odd([(3, 2.0)])   # w_{2n+1} = w_1 = 0
    assert theta_sharp(cert.phi1, cert.phi2, w_no_match) == pytest.approx(0.0, abs=1e-14)


def test_theta_sharp_quadrature_oracle():
    cert = certify_dirac_point(V10, 0, 24, W=W135)
    x = (np.arange(2048) + 0.5) / 2048.0
    f1 = cert.phi1.evaluate(x)
    f2 = cert.phi2.evaluate(x)
    quad = complex(np.mean(np.conj(f1) * W135.evaluate(x) * f2))
    assert abs(quad.imag) < 1e-12
    assert cert.theta_sharp == pytest.approx(quad.real, abs=1e-10)


def test_theta_sharp_sign_flip_invariance():
    cert = certify_dirac_point(V10, 0, 24)
    flipped1 = BlochMode(
        cert.phi1.k, cert.phi1.band, cert.phi1.energy, -cert.phi1.coeffs, cert.phi1.indices
    )
    flipped2 = inversion_map(flipped1)
    assert theta_sharp(flipped1, flipped2, W135) == pytest.approx(
        theta_sharp(cert.phi1, cert.phi2, W135), rel=1e-12
    )


def test_with_coupling():
    cert = certify_dirac_point(V0, 1, 16)
    assert cert.theta_sharp is None
    cert2 = with_coupling(cert, W135)
    assert cert2.theta_sharp == pytest.approx(1.0, abs=1e-12)


def test_k0_splitting_first_order():
    V2 = CosineSeries.even([(2, 2.0)])
    Em, Ep, (pm, pp) = k0_splitting(V2, 1, 0.1, 16)
    # first-order pair: 4 pi^2 + eps (v0 -+ v2/2) -> splitting eps*v2 = 0.2
    assert pp - pm == pytest.approx(0.2, rel=1e-12)
    assert Ep - Em == pytest.approx(0.2, rel=2e-3)
    assert abs(Em - pm) < 1e-3 and abs(Ep - pp) < 1e-3


def test_k0_splitting_quadratic_residual():
    V2 = CosineSeries.even([(2, 2.0)])
    resid = {}
    for eps in (0.1, 0.01):
        Em, Ep, (pm, pp) = k0_splitting(V2, 1, eps, 16)
        resid[eps] = max(abs(Em - pm), abs(Ep - pp))
    assert 50 <= resid[0.1] / resid[0.01] <= 200


def test_k0_splitting_vanishing_first_order():
    # v_{2n} = 0: splitting is second order only
    V4 = CosineSeries.even([(4, 2.0)])
    Em, Ep, (pm, pp) = k0_splitting(V4, 1, 0.1, 16)
    assert pp == pm == pytest.approx(4 * math.pi**2)
    assert Ep - Em < 5e-4


def test_gap_edges_formula():
    from edgeband.dirac import GapPrediction

    cert = certify_dirac_point(V0, 0, 16, W=W135)
    lo, hi = gap_edges_formula(cert, 0.1, 1.0, kprime=0.0)
    assert hi - lo == pytest.approx(2 * 0.1 * abs(cert.theta_sharp), rel=1e-12)
    pred = GapPrediction.from_certificate(cert, 0.1, 1.0)
    assert (pred.lower, pred.upper) == (lo, hi)
    assert pred.lower < cert.E_star < pred.upper
    lo2, hi2 = gap_edges_formula(cert, 0.0, 1.0, kprime=0.02)
    assert hi2 - lo2 == pytest.approx(2 * 0.02 * abs(cert.lambda_sharp), rel=1e-12)
    assert gap_edges_formula(cert, 0.0, 1.0, 0.0) == (cert.E_star, cert.E_star)
    with pytest.raises(ValueError):
        gap_edges_formula(cert, 0.1, 1.0, kprime=0.2)
    bare = certify_dirac_point(V0, 0, 16)
    with pytest.raises(ValueError):
        gap_edges_formula(bare, 0.1, 1.0)


def test_certify_sweep_reports_per_eps():
    from edgeband.dirac import certify_sweep

    V2 = CosineSeries.even([(2, 2.0)])
    results = certify_sweep(V2, 0, 20, [0.0, 0.5, 1.0, 5.0], W=W135)
    assert all(cert is not None for _, cert, _ in results)
    energies = [cert.E_star for _, cert, _ in results]
    assert energies[0] == pytest.approx(math.pi**2, rel=1e-13)
    assert all(e2 < e1 for e1, e2 in zip(energies, energies[1:]))  # crossings drift down
    # failures are reported, not raised
    bad = certify_sweep(CosineSeries.even([(2, 37.5)]), 1, 20, [1.0], tol=1e-18)
    assert bad[0][1] is None
    assert "tolerance" in bad[0][2]


def test_certificate_json_shape():
    cert = certify_dirac_point(V0, 0, 16, W=W1)
    d = certificate_json_dict(cert)
    assert set(d) == {
        "n", "E_star", "lambda_sharp", "theta_sharp",
        "degeneracy_residual", "slope_residual", "coeffs_phi1",
    }
    assert all(len(row) == 3 for row in d["coeffs_phi1"])
