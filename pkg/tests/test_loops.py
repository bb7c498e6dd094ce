"""Loop measure, determinant-ratio characteristic functionals, and the
enumeration oracle that cross-checks them."""

import math

import numpy as np
import pytest

from loopsoup.graph import OneForm, WeightedGraph, build_transition, greens_function
from loopsoup.loops import (EnumerationCapError, LoopError, RootedLoop,
                            UnrootedLoop, charfn_log_enumeration, clt_limit_charfn,
                            clt_variance, enumerate_loops,
                            enumeration_second_moment, exact_charfn, length_mass,
                            loop_integral, mu_of_unrooted, rooted_weight,
                            tail_bound, total_mass, trace_identity_residual)


def triangle():
    return WeightedGraph(3, [(0, 1), (1, 2), (0, 2)], [1.0, 1.0, 1.0])


def square():
    return WeightedGraph(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [1.0] * 4)


def test_rooted_and_unrooted_weights():
    """On the 3-cycle every transition entry is 1/3.  A back-and-forth
    (x,y) has rooted weight (1/2)(1/9); its class holds the two rootings
    (x,y) and (y,x) and no nontrivial rotation fixes either (m = 1), so
    the class weight is the full product 1/9.  The periodic word
    (0,1,0,1) is fixed by rotation through half its length (m = 2)."""
    P = build_transition(triangle())
    assert rooted_weight(RootedLoop((0, 1)), P) == pytest.approx(1.0 / 18.0)
    two = UnrootedLoop.from_vertices((1, 0))
    assert two.vertices == (0, 1) and two.multiplicity == 1
    assert mu_of_unrooted(two, P) == pytest.approx(1.0 / 9.0)
    four = UnrootedLoop.from_vertices((0, 1, 0, 1))
    assert four.multiplicity == 2
    assert mu_of_unrooted(four, P) == pytest.approx(1.0 / 162.0)
    tri = UnrootedLoop.from_vertices((2, 0, 1))
    assert tri.vertices == (0, 1, 2) and tri.multiplicity == 1
    assert mu_of_unrooted(tri, P) == pytest.approx(1.0 / 27.0)
    with pytest.raises(LoopError):
        rooted_weight(RootedLoop((0, 1, 1)), P)
    with pytest.raises(LoopError):
        RootedLoop((0,))


def test_loop_integral_orientation():
    g = triangle()
    A = OneForm(g, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): -1.0})
    assert loop_integral((0, 1, 2), A) == pytest.approx(3.0)
    assert loop_integral((0, 2, 1), A) == pytest.approx(-3.0)
    assert loop_integral((0, 1), A) == pytest.approx(0.0)


def test_length_mass_and_total_mass():
    """Tr(P^k)/k summed over k >= 2 telescopes to -log det(I - P);
    the 3-cycle value is 3 log 3 - 2 log 2 - log 5 + ... = 0.5232481...,
    frozen from an independent eigenvalue computation (eigs 2/3, -1/3,
    -1/3 give -log[(1/3)(4/3)(4/3)] = log(27/16))."""
    P = build_transition(triangle())
    assert total_mass(P) == pytest.approx(math.log(27.0 / 16.0), abs=1e-14)
    assert total_mass(P) == pytest.approx(0.523248143764548, abs=1e-14)
    partial = sum(length_mass(P, k) for k in range(2, 200))
    assert partial == pytest.approx(total_mass(P), abs=1e-12)
    with pytest.raises(ValueError):
        length_mass(P, 1)


def test_enumerate_loops_masses_by_length():
    """Summing the class weights by length must reproduce Tr(P^k)/k."""
    P = build_transition(square())
    by_len = {}
    for loop, w in enumerate_loops(P, 10):
        by_len[loop.length] = by_len.get(loop.length, 0.0) + w
    for k in range(2, 11):
        assert by_len.get(k, 0.0) == pytest.approx(length_mass(P, k), abs=1e-14)
    # odd lengths carry no mass on a bipartite graph
    assert by_len.get(3, 0.0) == 0.0 and by_len.get(5, 0.0) == 0.0


def test_enumerate_loops_distinct_classes():
    P = build_transition(triangle())
    seen = set()
    for loop, _ in enumerate_loops(P, 6):
        assert loop.vertices == min(
            loop.vertices[i:] + loop.vertices[:i] for i in range(loop.length))
        assert loop.vertices not in seen
        seen.add(loop.vertices)


def test_enumeration_cap():
    P = build_transition(WeightedGraph.grid(3, 3, 1.0))
    with pytest.raises(EnumerationCapError):
        list(enumerate_loops(P, 12, cap=1000))


def test_exact_charfn_triangle_single_edge():
    """Frozen closed form: on the 3-cycle with unit one-form on one edge,
    beta = pi flips that edge's entries, and the determinant ratio at
    lam = 1 is exactly 4/5."""
    P = build_transition(triangle())
    A = OneForm(triangle(), {(0, 1): 1.0})
    val = exact_charfn(P, A, math.pi, 1.0)
    assert val.imag == pytest.approx(0.0, abs=1e-15)
    assert val.real == pytest.approx(0.8, abs=1e-12)
    # lam enters as a power of the ratio
    assert exact_charfn(P, A, math.pi, 2.0).real == pytest.approx(0.64, abs=1e-12)
    assert abs(exact_charfn(P, A, 0.0, 3.0) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        exact_charfn(P, A, 1.0, 0.0)


def test_charfn_conjugate_symmetry():
    P = build_transition(square())
    A = OneForm(square(), {(0, 1): 0.7, (2, 3): -0.4})
    plus = exact_charfn(P, A, 1.3, 1.5)
    minus = exact_charfn(P, A, -1.3, 1.5)
    assert minus == pytest.approx(np.conj(plus), abs=1e-13)


def test_charfn_enumeration_matches_exact():
    """The rooted-walk partial sum of the exponent must agree with the
    determinant ratio within the geometric tail bound."""
    for g in (triangle(), square()):
        P = build_transition(g)
        A = OneForm(g, {e: 1.0 for e in g.edges})
        exact_log = -complex(np.log(exact_charfn(P, A, math.pi, 1.0)))
        partial = charfn_log_enumeration(P, A, math.pi, 14)
        assert abs(partial - (-exact_log)) <= tail_bound(P, 14)


def test_clt_variance_frozen_values():
    """sigma^2 for a unit one-form on a single edge: 1/8 on the 3-cycle
    (1/2 - 3/8 from the two trace terms) and 2/45 on the 4-cycle
    (2/5 - 16/45); both frozen after enumeration confirmed them."""
    g3, g4 = triangle(), square()
    P3, P4 = build_transition(g3), build_transition(g4)
    G3, G4 = greens_function(P3), greens_function(P4)
    assert clt_variance(P3, G3, OneForm(g3, {(0, 1): 1.0})) == pytest.approx(
        0.125, abs=1e-12)
    assert clt_variance(P4, G4, OneForm(g4, {(0, 1): 1.0})) == pytest.approx(
        2.0 / 45.0, abs=1e-12)


def test_clt_variance_matches_enumeration():
    g = triangle()
    P = build_transition(g)
    G = greens_function(P)
    A = OneForm(g, {(0, 1): 1.0})
    partial = enumeration_second_moment(P, A, A, 16)
    # second moments are nonnegative termwise here, so the partial sum
    # approaches from below and the gap is controlled by the tail
    assert partial <= 0.125 + 1e-15
    assert 0.125 - partial <= 4.0 * tail_bound(P, 16)


def test_clt_variance_matches_log_charfn_curvature():
    """-log E[e^{i beta S}] ~ lam beta^2 sigma^2 / 2 for small beta; a
    central second difference of the log at h = 1e-4 must match sigma^2
    to 1e-5 relative."""
    g = square()
    P = build_transition(g)
    G = greens_function(P)
    A = OneForm(g, {(0, 1): 1.0, (1, 2): 0.5})
    sigma2 = clt_variance(P, G, A)
    h = 1e-4
    fd = -(np.log(exact_charfn(P, A, h, 1.0))
           + np.log(exact_charfn(P, A, -h, 1.0))).real / (h * h)
    assert fd == pytest.approx(sigma2, rel=1e-5)
    assert clt_limit_charfn(P, G, A, 1.0) == pytest.approx(
        math.exp(-0.5 * sigma2))


def test_trace_identity_on_random_symmetric_instances():
    """For symmetric P the quartic sum over ordered adjacent pairs of
    P P A B (G G - G G) halves onto Tr[(P.A) G (P.B) G]."""
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 10:
        n = 4 + int(rng.integers(0, 3))
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.6]
        if {v for e in edges for v in e} != set(range(n)):
            continue
        try:
            probe = WeightedGraph(n, edges, [1.0] * n)
        except Exception:
            continue
        denom = float(np.max(probe.degrees)) + 1.0
        g = WeightedGraph(n, edges, [denom - float(d) for d in probe.degrees])
        P = build_transition(g)
        G = greens_function(P)
        A = OneForm(g, {e: float(rng.normal()) for e in g.edges})
        B = OneForm(g, {e: float(rng.normal()) for e in g.edges})
        assert trace_identity_residual(P, G, A, B) < 1e-12
        checked += 1


def test_trace_identity_requires_symmetry():
    g = WeightedGraph(3, [(0, 1), (1, 2)], [1.0, 1.0, 1.0])
    P = build_transition(g)  # degrees differ, so P is not symmetric
    G = greens_function(P)
    A = OneForm(g, {(0, 1): 1.0})
    with pytest.raises(ValueError):
        trace_identity_residual(P, G, A, A)


def test_tail_bound_dominates_actual_tail():
    P = build_transition(triangle())
    for k_max in (6, 10, 16):
        actual = sum(length_mass(P, k) for k in range(k_max + 1, 400))
        assert tail_bound(P, k_max) >= actual
    # frozen value used by the acceptance gates
    assert tail_bound(P, 16) == pytest.approx(0.0005874908778620926, rel=1e-6)
