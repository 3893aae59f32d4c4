"""Plane-wave Floquet-Bloch solver: free dispersion, sectors, inversion."""
import math

import numpy as np
import pytest

from edgeband.bloch import (
    PlaneWaveBasis,
    apply_hamiltonian,
    band_sweep,
    bloch_spectrum,
    hill_matrix,
    inversion_map,
    parity_spectrum,
    write_band_csv,
)
from edgeband.potentials import CosineSeries

V0 = CosineSeries.zero()
V10 = CosineSeries.even([(2, 10.0)])


def test_free_spectrum_at_pi():
    modes = bloch_spectrum(V0, math.pi, 8, 4)
    energies = [m.energy for m in modes]
    pi2 = math.pi**2
    assert energies == pytest.approx([pi2, pi2, 9 * pi2, 9 * pi2], rel=1e-14)


def test_free_spectrum_at_zero():
    modes = bloch_spectrum(V0, 0.0, 8, 3)
    assert modes[0].energy == pytest.approx(0.0, abs=1e-12)
    assert modes[1].energy == pytest.approx(4 * math.pi**2, rel=1e-14)
    assert modes[2].energy == pytest.approx(4 * math.pi**2, rel=1e-14)


def test_strong_coupling_double_eigenvalue():
    modes = bloch_spectrum(V10, math.pi, 24, 2)
    assert modes[0].energy == pytest.approx(9.45, abs=0.05)
    assert abs(modes[0].energy - modes[1].energy) < 1e-10


def test_basis_dimensions_and_sector_guards():
    assert PlaneWaveBasis(8, math.pi, "full").dimension == 17
    assert PlaneWaveBasis(8, math.pi, "even-index").dimension == 9
    assert PlaneWaveBasis(8, math.pi, "odd-index").dimension == 8
    with pytest.raises(ValueError):
        PlaneWaveBasis(8, 1.0, "even-index")


def test_truncation_preconditions():
    with pytest.raises(ValueError):
        bloch_spectrum(V10, 1.0, 3, 2)       # M < maxharm + 2
    with pytest.raises(ValueError):
        bloch_spectrum(V0, 1.0, 8, 18)       # n_bands > 2M+1


def test_eigenvector_orthonormality_and_residual():
    modes = bloch_spectrum(V10, 1.3, 20, 8)
    C = np.array([m.coeffs for m in modes])
    gram = C.conj() @ C.T
    assert np.max(np.abs(gram - np.eye(8))) < 1e-12
    for m in modes:
        r = apply_hamiltonian(V10, m) - m.energy * m.coeffs
        assert np.linalg.norm(r) < 1e-10 * (1.0 + abs(m.energy))


def test_truncation_convergence():
    e16 = bloch_spectrum(V10, 2.0, 16, 4)
    e24 = bloch_spectrum(V10, 2.0, 24, 4)
    diffs = [abs(a.energy - b.energy) for a, b in zip(e16, e24)]
    assert max(diffs) < 1e-10


def test_band_sweep_free_dispersion_and_symmetry():
    bs = band_sweep(V0, 33, 8, 5)
    assert math.pi in bs.k_grid
    for k, row in zip(bs.k_grid, bs.bands):
        exact = np.sort((k + 2 * np.pi * np.arange(-8, 9)) ** 2)[:5]
        assert np.max(np.abs(row - exact)) < 1e-10
    assert np.max(np.abs(bs.bands - bs.bands[::-1])) < 1e-9


def test_band_sweep_degeneracy_lifting():
    bs = band_sweep(V10, 65, 20, 3)
    i_pi = int(np.argmin(np.abs(bs.k_grid - math.pi)))
    touch = bs.bands[i_pi, 1] - bs.bands[i_pi, 0]
    assert touch < 1e-9                       # bands 1 and 2 touch at pi
    off_pi = np.delete(bs.bands[:, 1] - bs.bands[:, 0], i_pi)
    assert np.min(off_pi) > 1e-6              # and only there
    i_0 = 0
    assert bs.bands[i_0, 2] - bs.bands[i_0, 1] > 0.1   # k=0 degeneracy lifted


def test_parity_spectrum_free_case():
    pi2 = math.pi**2
    even = [m.energy for m in parity_spectrum(V0, "even-index", 8, 3)]
    odd = [m.energy for m in parity_spectrum(V0, "odd-index", 8, 3)]
    assert even == pytest.approx([pi2, 9 * pi2, 25 * pi2], rel=1e-14)
    assert odd == pytest.approx([pi2, 9 * pi2, 25 * pi2], rel=1e-14)


def test_parity_sector_degeneracy_and_union():
    even = parity_spectrum(V10, "even-index", 16, 17)
    odd = parity_spectrum(V10, "odd-index", 16, 16)
    assert abs(even[0].energy - odd[0].energy) < 1e-10
    union = np.sort([m.energy for m in even] + [m.energy for m in odd])
    full = np.linalg.eigvalsh(hill_matrix(V10, math.pi, 16))
    assert np.max(np.abs(union - full)) < 1e-10


def test_parity_requires_even_potential():
    with pytest.raises(ValueError):
        parity_spectrum(CosineSeries.odd([(1, 1.0)]), "even-index", 8, 2)


def test_inversion_map_delta_and_involution():
    mode = parity_spectrum(V0, "even-index", 8, 1)[0]    # c = delta_{m,0}
    image = inversion_map(mode)
    assert image.coefficient(-1) == pytest.approx(1.0)
    assert sum(abs(image.coefficient(m)) for m in range(-8, 9) if m != -1) == 0.0
    twice = inversion_map(image)
    assert np.max(np.abs(twice.embed(mode.indices) - mode.coeffs)) < 1e-14


def test_inversion_map_sector_flip_and_residual():
    even = parity_spectrum(V10, "even-index", 24, 1)[0]
    image = inversion_map(even)
    assert np.all(image.indices % 2 != 0)
    assert image.energy == even.energy
    r = apply_hamiltonian(V10, image) - even.energy * image.coeffs
    assert np.linalg.norm(r) < 1e-8


def test_inversion_map_flags_dropped_mass():
    mode = parity_spectrum(V10, "even-index", 6, 1)[0]
    # inject mass at the top index so the image must drop it
    coeffs = mode.coeffs.copy()
    coeffs[-1] = 0.3
    coeffs /= np.linalg.norm(coeffs)
    from edgeband.bloch import BlochMode

    bad = BlochMode(mode.k, 1, mode.energy, coeffs, mode.indices)
    with pytest.raises(ValueError):
        inversion_map(bad)


def test_weyl_growth():
    modes = bloch_spectrum(V10, 1.0, 24, 12)
    ratios = np.array([m.energy / m.band**2 for m in modes])
    assert np.all(ratios > 0.3)
    assert np.all(ratios < 12.0)


def test_band_csv(tmp_path):
    bs = band_sweep(V0, 5, 4, 2)
    path = tmp_path / "bands.csv"
    write_band_csv(bs, str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "k,E_1,E_2"
    assert len(lines) == len(bs.k_grid) + 1


def test_band_sweep_deterministic_under_threads(monkeypatch):
    monkeypatch.setenv("EDGEBAND_THREADS", "4")
    a = band_sweep(V10, 17, 16, 4)
    monkeypatch.setenv("EDGEBAND_THREADS", "1")
    b = band_sweep(V10, 17, 16, 4)
    assert np.array_equal(a.bands, b.bands)
