"""Dense complex matrix helpers shared by the determinant-ratio formulas.

Everything here wraps numpy's LAPACK-backed routines; the one piece of
actual logic is `logdet_i_minus`, which resolves the branch of
log det(I - M) so that non-integer powers of determinant ratios are
well defined.
"""

from __future__ import annotations

import numpy as np


def hadamard(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Entrywise product; (u . v)_ij = u_ij * v_ij exactly."""
    return u * v


def logdet_stable(M: np.ndarray) -> complex:
    """log det M via pivoted LU, accumulating log-magnitude and phase.

    The phase is only defined mod 2*pi; use logdet_i_minus when a
    branch-consistent value is needed.
    """
    sign, logabs = np.linalg.slogdet(M)
    if logabs == -np.inf:
        raise np.linalg.LinAlgError("singular matrix in logdet")
    return complex(np.log(sign) + logabs)


def logdet_i_minus(M: np.ndarray) -> complex:
    """Branch-correct log det(I - M) for a matrix of spectral radius < 1.

    Computed as sum_i Log(1 - eig_i(M)) with principal logs: every factor
    1 - eig has positive real part because |eig| < 1, so each log is
    unambiguous and the sum equals the convergent series
    -sum_k Tr(M^k)/k.  This is the branch on which (det ratio)^{-lambda}
    means the Poisson-soup expectation for any real lambda.
    """
    eigs = np.linalg.eigvals(M)
    if np.max(np.abs(eigs)) >= 1.0:
        raise ValueError("spectral radius >= 1; log det(I - M) series diverges")
    return complex(np.sum(np.log(1.0 - eigs)))


def det_expansion_check(M: np.ndarray) -> float:
    """Residual of det(I+M) against its elementary-symmetric expansion.

    det(I+M) = sum_k e_k(eigenvalues); test utility for m <= 6.  Returns
    |det(I+M) - sum_k e_k|, which must be <= 1e-8 * (1 + |det|).
    """
    m = M.shape[0]
    if m > 6:
        raise ValueError("det_expansion_check is a test utility for m <= 6")
    eigs = np.linalg.eigvals(M)
    # e_0..e_m by the Newton-free recurrence: multiply out prod(1 + x*eig)
    coeffs = np.zeros(m + 1, dtype=complex)
    coeffs[0] = 1.0
    for lam in eigs:
        coeffs[1:] = coeffs[1:] + lam * coeffs[:-1]
    expansion = np.sum(coeffs)
    det = np.linalg.det(np.eye(m) + M)
    return float(abs(det - expansion))


def spectral_radius_power_iteration(P: np.ndarray, steps: int = 200, seed: int = 0) -> float:
    """Power-iteration estimate of rho(P) on |P| (entrywise magnitudes).

    Used for truncation tail bounds; callers apply their own safety
    factor.  |P| has the same spectral radius bound and a nonnegative
    Perron vector, which keeps the iteration stable.
    """
    M = np.abs(P)
    n = M.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.random(n) + 0.1
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(steps):
        w = M @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        est = norm
        v = w / norm
    return float(est)
