"""Winding of the Brownian loop soup around a point: the Cauchy limit.

Loops of diameter between delta and d_z contribute a total winding
W(delta, d_z) around a point at distance d_z from the domain boundary;
its characteristic function has the closed form

    E[e^{i beta W}] = (d_z / delta)^(-lam beta'(2 pi - beta') / 4 pi^2),

with beta' the representative of beta in [0, 2 pi).  Evaluating at
beta = s / log(delta) and letting delta -> 0 sends this to the Cauchy
characteristic function e^{-lam |s| / 2 pi}: the winding divided by
|log delta| converges to a centered Cauchy law of scale lam / 2 pi.
Loops larger than d_z are independent of W and contribute a factor that
tends to 1 (a fixed characteristic function evaluated at s/log delta),
so the annulus part carries the whole limit.

Everything is closed-form, so the module is deterministic numerics: the
convergence study tabulates the sup-distance between the scaled and
limit characteristic functions along a geometric delta grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class SpitzerError(ValueError):
    """Invalid annulus or scaling parameters."""


@dataclass(frozen=True)
class AnnulusWindingParams:
    """Cutoffs and intensity for the truncated winding."""

    delta: float
    d_z: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.delta < self.d_z):
            raise SpitzerError("need 0 < delta < d_z")
        if self.lam <= 0:
            raise SpitzerError("intensity lam must be > 0")


@dataclass(frozen=True)
class CauchyLaw:
    """Centered Cauchy law; the limit has scale lam / 2 pi."""

    scale: float
    location: float = 0.0

    def __post_init__(self):
        if self.scale <= 0:
            raise SpitzerError("scale must be > 0")

    @classmethod
    def from_intensity(cls, lam: float) -> "CauchyLaw":
        return cls(scale=lam / (2.0 * math.pi))

    def charfn(self, s: float) -> float:
        return math.exp(-self.scale * abs(s))


def annulus_charfn(params: AnnulusWindingParams, beta: float) -> float:
    """E[e^{i beta W}]: real, in (0, 1], 2 pi periodic in beta and
    symmetric under beta -> 2 pi - beta."""
    two_pi = 2.0 * math.pi
    beta_p = beta - two_pi * math.floor(beta / two_pi)
    exponent = -params.lam * beta_p * (two_pi - beta_p) / (4.0 * math.pi ** 2)
    return (params.d_z / params.delta) ** exponent


def scaled_charfn(params: AnnulusWindingParams, s: float) -> float:
    """Characteristic function of W / log(delta) at s, i.e. the annulus
    form at beta = s / log(delta); needs delta < 1 so the scale is real."""
    if params.delta >= 1.0:
        raise SpitzerError("scaling by log(delta) needs delta < 1")
    return annulus_charfn(params, s / math.log(params.delta))


def cauchy_limit_charfn(lam: float, s: float) -> float:
    """exp(-lam |s| / 2 pi), the delta -> 0 limit of scaled_charfn."""
    return CauchyLaw.from_intensity(lam).charfn(s)


@dataclass(frozen=True)
class ConvergenceRow:
    delta: float
    s: float
    scaled: float
    limit: float
    abs_error: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-point errors and per-delta sup errors of scaled vs limit."""

    rows: tuple[ConvergenceRow, ...]
    sup_errors: tuple[tuple[float, float], ...]   # (delta, sup over s)

    @property
    def monotone_decreasing(self) -> bool:
        sups = [e for _, e in self.sup_errors]
        return all(a > b for a, b in zip(sups, sups[1:]))


def convergence_report(lam: float, d_z: float, s_grid,
                       delta_grid) -> ConvergenceReport:
    """Tabulate |scaled_charfn - cauchy_limit_charfn| over the grids.

    With a geometrically shrinking delta grid the sup error per delta
    decreases monotonically; no rate is asserted, only the trend.
    """
    rows = []
    sups = []
    for delta in delta_grid:
        params = AnnulusWindingParams(delta, d_z, lam)
        worst = 0.0
        for s in s_grid:
            sc = scaled_charfn(params, s)
            lim = cauchy_limit_charfn(lam, s)
            err = abs(sc - lim)
            rows.append(ConvergenceRow(float(delta), float(s), sc, lim, err))
            worst = max(worst, err)
        sups.append((float(delta), worst))
    return ConvergenceReport(tuple(rows), tuple(sups))
