"""Sturm counts, bisection, and inverse iteration against dense oracles."""
import math

import numpy as np
import pytest

from edgeband.errors import ConvergenceError
from edgeband.tridiag import (
    eigenvalues_in_interval,
    gershgorin_bounds,
    inverse_iteration,
    lowest_eigenvalues,
    sturm_count,
)


def _random_tridiag(rng, n):
    return rng.normal(size=n) * 2.0, rng.normal(size=n - 1)


def test_sturm_count_monotone_and_matches_dense():
    rng = np.random.default_rng(3)
    for n in (5, 60, 217, 400):
        diag, off = _random_tridiag(rng, n)
        dense = np.linalg.eigvalsh(np.diag(diag) + np.diag(off, 1) + np.diag(off, -1))
        prev = 0
        for x in np.linspace(dense[0] - 0.5, dense[-1] + 0.5, 97):
            c = sturm_count(diag, off, x)
            assert c == int(np.sum(dense < x))
            assert c >= prev
            prev = c


def test_sturm_count_straddling_eigenvalues():
    # Counting exactly at an eigenvalue is ulp-ambiguous; straddle instead.
    rng = np.random.default_rng(4)
    diag, off = _random_tridiag(rng, 120)
    dense = np.linalg.eigvalsh(np.diag(diag) + np.diag(off, 1) + np.diag(off, -1))
    for j in range(0, 120, 11):
        for x in (dense[j] - 1e-9, dense[j] + 1e-9):
            assert sturm_count(diag, off, x) == int(np.sum(dense < x))


def test_eigenvalues_in_interval_bisection_accuracy():
    rng = np.random.default_rng(5)
    diag, off = _random_tridiag(rng, 200)
    dense = np.linalg.eigvalsh(np.diag(diag) + np.diag(off, 1) + np.diag(off, -1))
    lo, hi = dense[40] - 1e-6, dense[60] + 1e-6
    got = eigenvalues_in_interval(diag, off, lo, hi)
    expected = dense[(dense > lo) & (dense < hi)]
    assert len(got) == len(expected)
    assert np.max(np.abs(got - expected)) < 1e-11


def test_empty_window_between_eigenvalues():
    diag = np.array([1.0, 2.0, 5.0])
    off = np.zeros(2)
    assert len(eigenvalues_in_interval(diag, off, 2.5, 4.5)) == 0


def test_window_eigencount_refusal():
    rng = np.random.default_rng(6)
    diag, off = _random_tridiag(rng, 300)
    lo, hi = gershgorin_bounds(diag, off)
    with pytest.raises(ConvergenceError):
        eigenvalues_in_interval(diag, off, lo - 1, hi + 1, max_count=64)


def test_lowest_eigenvalues_matches_dense():
    rng = np.random.default_rng(7)
    diag, off = _random_tridiag(rng, 250)
    dense = np.linalg.eigvalsh(np.diag(diag) + np.diag(off, 1) + np.diag(off, -1))
    got = lowest_eigenvalues(diag, off, 6)
    assert np.max(np.abs(got - dense[:6])) < 1e-11


def test_fd_dirichlet_laplacian_window():
    # Laplacian on [0, pi], h = pi/200: eigenvalues (4/h^2) sin^2(n h / 2)
    n = 199
    h = math.pi / 200.0
    diag = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    got = eigenvalues_in_interval(diag, off, 0.5, 4.5)
    exact = [(4.0 / h**2) * math.sin(k * h / 2.0) ** 2 for k in (1, 2)]
    assert got == pytest.approx(exact, abs=1e-10)
    assert got[0] == pytest.approx(0.99998, abs=1e-5)
    assert got[1] == pytest.approx(3.99967, abs=1e-5)


def test_inverse_iteration_eigenvector():
    rng = np.random.default_rng(8)
    diag, off = _random_tridiag(rng, 180)
    T = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    dense_vals, dense_vecs = np.linalg.eigh(T)
    E = dense_vals[90]
    v, rq = inverse_iteration(diag, off, E)
    assert abs(rq - E) < 1e-10
    overlap = abs(dense_vecs[:, 90] @ v)
    assert overlap > 1.0 - 1e-10
