"""Determinant and log-determinant helpers for contraction matrices."""

import numpy as np
import pytest

from loopsoup.linalg import (det_expansion_check, hadamard, logdet_i_minus,
                             logdet_stable, spectral_radius_power_iteration)


def test_hadamard_is_entrywise():
    u = np.arange(6, dtype=float).reshape(2, 3)
    v = np.full((2, 3), 2.0)
    assert np.array_equal(hadamard(u, v), u * 2.0)


def test_logdet_stable_matches_direct():
    rng = np.random.default_rng(3)
    M = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    ld = logdet_stable(M)
    assert np.exp(ld) == pytest.approx(np.linalg.det(M), rel=1e-10)


def test_logdet_i_minus_contraction():
    """For rho(M) < 1, log det(I - M) is the sum of Log(1 - eig), which
    equals the convergent series -sum_k Tr(M^k)/k; check against a
    truncation of that series."""
    rng = np.random.default_rng(4)
    M = rng.normal(size=(4, 4))
    M *= 0.4 / np.max(np.abs(np.linalg.eigvals(M)))
    ld = logdet_i_minus(M)
    series = -sum(np.trace(np.linalg.matrix_power(M, k)) / k
                  for k in range(1, 200))
    assert ld == pytest.approx(series, abs=1e-12)
    assert np.exp(ld) == pytest.approx(np.linalg.det(np.eye(4) - M), rel=1e-12)


def test_logdet_i_minus_rejects_expansion():
    M = np.eye(3) * 1.5
    with pytest.raises(ValueError):
        logdet_i_minus(M)


def test_logdet_i_minus_complex_branch():
    """Entrywise phases must not push the value onto another branch of
    the logarithm: the result always matches the series limit, not just
    det up to 2*pi*i."""
    rng = np.random.default_rng(5)
    M = rng.normal(size=(6, 6)) * np.exp(1j * rng.uniform(-np.pi, np.pi, (6, 6)))
    M *= 0.7 / np.max(np.abs(np.linalg.eigvals(M)))
    ld = logdet_i_minus(M)
    series = -sum(np.trace(np.linalg.matrix_power(M, k)) / k
                  for k in range(1, 400))
    assert ld == pytest.approx(series, abs=1e-10)


def test_det_expansion_check_small():
    rng = np.random.default_rng(6)
    M = rng.normal(size=(3, 3)) * 0.2
    assert det_expansion_check(M) < 1e-12


def test_spectral_radius_power_iteration():
    M = np.diag([0.3, 0.6, 0.1]).astype(float)
    r = spectral_radius_power_iteration(M)
    assert r == pytest.approx(0.6, rel=1e-6)
