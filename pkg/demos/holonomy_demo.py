"""Matrix-valued loop holonomies and their high-intensity limit.

Put a Hermitian generator A_e on each edge; a loop picks up the ordered
product of exp(i beta A_e) and contributes the normalized trace
(1/d) Tr(U).  Over the whole soup the expected product is again a
determinant ratio, now of the nd x nd block-twisted transition matrix,
raised to -lam/d.  At beta = 1/sqrt(lam), lam -> infinity, the
expectation converges to a Gaussian-type closed form built from two
traces; this script tabulates the approach.
"""

import numpy as np

from loopsoup import (Connection, WeightedGraph, build_transition,
                      exact_holonomy_expectation, greens_function,
                      holonomy_limit, holonomy_log_enumeration, tail_bound)


def main():
    g = WeightedGraph(3, [(0, 1), (1, 2), (0, 2)], [1.0, 1.0, 1.0])
    P = build_transition(g)
    G = greens_function(P)

    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    conn = Connection(g, 2, {(0, 1): sx, (1, 2): 0.5 * sy})
    print("triangle with Pauli generators on two edges, fiber d=2")

    beta, lam = 1.0, 1.0
    exact = exact_holonomy_expectation(P, conn, beta, lam)
    part = np.exp(holonomy_log_enumeration(P, conn, beta, 12))
    print(f"\nblock determinant: {exact:.12f}")
    print(f"enumeration k<=12: {part:.12f}"
          f"  (tail bound {tail_bound(P, 12):.2e})")

    limit = holonomy_limit(P, G, conn)
    print(f"\nhigh-intensity limit value: {limit:.12f}")
    print("approach at beta = 1/sqrt(lam):")
    for lam in (1e1, 1e2, 1e3, 1e4):
        val = exact_holonomy_expectation(P, conn, lam ** -0.5, lam)
        print(f"  lam = {lam:8.0f}: |E - limit| = {abs(val - limit):.3e}")


if __name__ == "__main__":
    main()
