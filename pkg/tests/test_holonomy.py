"""Matrix-valued loop transports and their soup expectations."""

import math

import numpy as np
import pytest

from loopsoup.graph import OneForm, WeightedGraph, build_transition, greens_function
from loopsoup.holonomy import (Connection, HolonomyError, block_transport_matrix,
                               exact_holonomy_expectation, holonomy_limit,
                               holonomy_log_enumeration, holonomy_trace,
                               matrix_exp_hermitian)
from loopsoup.loops import (clt_limit_charfn, clt_variance, exact_charfn,
                            tail_bound)


def triangle():
    return WeightedGraph(3, [(0, 1), (1, 2), (0, 2)], [1.0, 1.0, 1.0])


def pauli_connection(g):
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    return Connection(g, 2, {(0, 1): sx, (1, 2): 0.5 * sy})


def test_matrix_exp_hermitian_unitary():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    A = (A + A.conj().T) / 2.0
    U = matrix_exp_hermitian(A, 0.7)
    assert np.allclose(U @ U.conj().T, np.eye(3), atol=1e-12)
    assert np.array_equal(matrix_exp_hermitian(A, 0.0), np.eye(3))
    with pytest.raises(HolonomyError):
        matrix_exp_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_connection_orientation_and_validation():
    g = triangle()
    conn = pauli_connection(g)
    assert np.array_equal(conn.generator(1, 0), -conn.generator(0, 1))
    assert np.array_equal(conn.generator(0, 2), np.zeros((2, 2)))
    U = conn.transport(0, 1, 0.3)
    V = conn.transport(1, 0, 0.3)
    assert np.allclose(U @ V, np.eye(2), atol=1e-14)
    with pytest.raises(HolonomyError):
        Connection(g, 2, {(0, 1): np.array([[0.0, 1.0], [0.0, 0.0]])})
    with pytest.raises(HolonomyError):
        Connection(g, 1, {(1, 3): np.array([[1.0]])})
    with pytest.raises(HolonomyError):
        Connection(g, 0, {})


def test_connection_round_trip():
    g = triangle()
    conn = pauli_connection(g)
    again = Connection.from_dict(g, conn.to_dict())
    for x, y in ((0, 1), (1, 2), (0, 2)):
        assert np.allclose(conn.generator(x, y), again.generator(x, y),
                           atol=1e-15)


def test_holonomy_trace_rotation_invariance():
    g = triangle()
    conn = pauli_connection(g)
    base = holonomy_trace((0, 1, 2), conn, 0.9)
    assert holonomy_trace((1, 2, 0), conn, 0.9) == pytest.approx(base, abs=1e-14)
    assert holonomy_trace((2, 0, 1), conn, 0.9) == pytest.approx(base, abs=1e-14)
    # reversal conjugates
    rev = holonomy_trace((0, 2, 1), conn, 0.9)
    assert rev == pytest.approx(np.conj(base), abs=1e-14)
    assert abs(base) <= 1.0 + 1e-14


def test_dimension_one_reduces_to_charfn():
    """At d = 1 the transports are scalars e^{i beta A_xy}, so the block
    determinant must reproduce the one-form characteristic function."""
    g = triangle()
    P = build_transition(g)
    A = OneForm(g, {(0, 1): 1.0, (1, 2): -0.4})
    conn = Connection(g, 1, {(0, 1): np.array([[1.0]]),
                             (1, 2): np.array([[-0.4]])})
    for beta, lam in ((math.pi, 1.0), (0.7, 2.5), (-1.3, 0.5)):
        a = exact_holonomy_expectation(P, conn, beta, lam)
        b = exact_charfn(P, A, beta, lam)
        assert abs(a - b) < 1e-12


def test_exact_expectation_matches_enumeration_d2():
    """The -lam/d normalization of the block-determinant ratio is what
    the rooted-loop oracle reproduces at d = 2; the plain -lam exponent
    misses by more than the toleranced tail."""
    g = triangle()
    P = build_transition(g)
    conn = Connection(g, 2, {(0, 1): np.diag([1.0, 0.5])})
    exact = exact_holonomy_expectation(P, conn, 1.0, 1.0)
    part = holonomy_log_enumeration(P, conn, 1.0, 12)
    approx = complex(np.exp(part))
    tol = 2.0 * tail_bound(P, 12)
    assert abs(exact - approx) <= tol
    B = block_transport_matrix(P, conn, 1.0)
    from loopsoup.linalg import logdet_i_minus
    wrong = complex(np.exp(-(logdet_i_minus(B.matrix)
                             - 2 * logdet_i_minus(P))))
    assert abs(wrong - approx) > tol


def test_zero_connection_is_trivial():
    g = triangle()
    P = build_transition(g)
    conn = Connection.zero(g, 3)
    assert exact_holonomy_expectation(P, conn, 2.0, 1.7) == pytest.approx(
        1.0, abs=1e-13)
    assert holonomy_trace((0, 1, 2), conn) == pytest.approx(1.0)


def test_requires_symmetric_transition():
    g = WeightedGraph(3, [(0, 1), (1, 2)], [1.0, 1.0, 1.0])
    P = build_transition(g)
    conn = Connection.zero(g, 2)
    with pytest.raises(HolonomyError):
        exact_holonomy_expectation(P, conn, 1.0, 1.0)


def test_limit_reduces_to_scalar_variance_at_d1():
    g = triangle()
    P = build_transition(g)
    G = greens_function(P)
    A = OneForm(g, {(0, 1): 1.0, (0, 2): 0.3})
    conn = Connection(g, 1, {(0, 1): np.array([[1.0]]),
                             (0, 2): np.array([[0.3]])})
    assert holonomy_limit(P, G, conn) == pytest.approx(
        clt_limit_charfn(P, G, A, 1.0), abs=1e-13)


def test_finite_intensity_approaches_limit():
    """E at beta = 1/sqrt(lam) must approach the closed-form limit
    monotonically over lam = 10^2, 10^3, 10^4."""
    g = triangle()
    P = build_transition(g)
    G = greens_function(P)
    conn = pauli_connection(g)
    limit = holonomy_limit(P, G, conn)
    gaps = [abs(exact_holonomy_expectation(P, conn, lam ** -0.5, lam) - limit)
            for lam in (1e2, 1e3, 1e4)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4


def test_gauge_covariance():
    """Conjugating every generator by a fixed unitary leaves all loop
    holonomies, hence the expectation, unchanged."""
    g = triangle()
    P = build_transition(g)
    conn = pauli_connection(g)
    rng = np.random.default_rng(8)
    H = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    W = matrix_exp_hermitian((H + H.conj().T) / 2.0)
    gens = {(x, y): W @ conn.generator(x, y) @ W.conj().T
            for (x, y) in ((0, 1), (1, 2), (0, 2))}
    conj = Connection(g, 2, gens)
    assert holonomy_trace((0, 1, 2), conj, 1.3) == pytest.approx(
        holonomy_trace((0, 1, 2), conn, 1.3), abs=1e-12)
    a = exact_holonomy_expectation(P, conn, 1.3, 2.0)
    b = exact_holonomy_expectation(P, conj, 1.3, 2.0)
    assert abs(a - b) < 1e-12
