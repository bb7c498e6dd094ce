"""Winding of a Brownian loop soup around a point: the Cauchy limit.

Loops of the Brownian soup in an annulus of inner radius delta wind
around the center; the characteristic function of the total winding
restricted to frequency band (0, 2 pi) has the closed form
(d_z / delta)^(-lam beta (2 pi - beta) / 4 pi^2).  Evaluated at
beta = s / log(1/delta), the log diverges linearly and the rescaled
winding converges to a Cauchy law with charfn exp(-lam |s| / 2 pi).
This is the soup analogue of the classical heavy-tailed winding of a
single Brownian motion.
"""

import numpy as np

from loopsoup import (AnnulusWindingParams, cauchy_limit_charfn,
                      convergence_report, scaled_charfn)


def main():
    lam, d_z = 2.0 * np.pi, 1.0
    print(f"lam = 2 pi, outer scale d_z = {d_z:g}")

    print("\npointwise, s = 1.5:")
    for delta in (1e-2, 1e-6, 1e-12):
        s = 1.5
        params = AnnulusWindingParams(lam=lam, d_z=d_z, delta=delta)
        print(f"  delta = {delta:7.0e}: scaled {scaled_charfn(params, s):.8f}"
              f"  limit {cauchy_limit_charfn(lam, s):.8f}")

    s_grid = np.linspace(-5.0, 5.0, 41)
    deltas = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12]
    rep = convergence_report(lam, d_z, s_grid, deltas)
    print("\nsup error over |s| <= 5:")
    for delta, sup in rep.sup_errors:
        print(f"  delta = {delta:7.0e}: {sup:.3e}")
    print(f"monotone decreasing: {rep.monotone_decreasing}")


if __name__ == "__main__":
    main()
