"""Exact Monte Carlo sampling of the loop soup.

The soup with intensity lam is a Poisson process over unrooted loops with
mean measure lam * mu.  Sampling factorizes exactly:

* the number of loops is Poisson(lam * total_mass);
* each loop's length k has probability (Tr(P^k)/k) / total_mass;
* given k, the root is drawn with probability (P^k)_{x0,x0} / Tr(P^k) and
  successive vertices by the bridge rule
      Pr(next = w | at v, r steps remain) = P_vw (P^{r-1})_{w,x0} / (P^r)_{v,x0},
  whose telescoping product gives every rooted sequence probability
  prod(P entries) / Tr(P^k).  Forgetting the root then realizes the
  normalized mu restricted to length k, multiplicity included.

Lengths are truncated at an adaptive cap K with tail mass at most
epsilon * total_mass, so the sampled law is within total variation
epsilon of the exact one.  The Poisson mean and the length inversion both
use the UNtruncated total mass, so enlarging K never disturbs draws that
already fell below the smaller cap.

Determinism: replica (or stream) j uses the counter-based generator
Philox(key=seed) jumped j blocks ahead, so results are independent of
how replicas are distributed over workers.  Each sampler documents its
fixed draw order; in all of them the final step of a loop is forced back
to the root and consumes no randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph
from .linalg import spectral_radius_power_iteration
from .loops import RootedLoop, UnrootedLoop, total_mass


class SamplerError(ValueError):
    """Invalid sampler configuration or arguments."""


@dataclass(frozen=True)
class SoupConfig:
    """Parameters of one soup-sampling run."""

    lam: float
    epsilon: float = 1e-12
    k_cap: int = 512
    seed: int = 0
    streams: int = 1

    def __post_init__(self):
        if self.lam <= 0:
            raise SamplerError("intensity lam must be > 0")
        if not (0.0 < self.epsilon < 1.0):
            raise SamplerError("epsilon must lie in (0, 1)")
        if self.k_cap < 2:
            raise SamplerError("k_cap must be >= 2")
        if self.streams < 1:
            raise SamplerError("streams must be >= 1")


@dataclass(frozen=True)
class LoopSoupSample:
    """One realization of the soup: a multiset of unrooted loops."""

    loops: tuple[UnrootedLoop, ...]
    seed: int
    counts_per_length: dict[int, int] = field(compare=False)

    @property
    def size(self) -> int:
        return len(self.loops)


class PowerCache:
    """Matrix powers P^1..P^K, their traces, and the length/root tables.

    K is the smallest cap whose geometric tail bound
    sum_{k>K} n rho^k / k <= n rho^{K+1} / ((K+1)(1-rho)) falls below
    epsilon * total_mass, subject to the configured ceiling k_cap.
    """

    def __init__(self, P: np.ndarray, epsilon: float = 1e-12, k_cap: int = 512):
        if not (0.0 < epsilon < 1.0):
            raise SamplerError("epsilon must lie in (0, 1)")
        n = P.shape[0]
        rho = 1.01 * spectral_radius_power_iteration(P)
        if rho >= 1.0:
            raise SamplerError("spectral radius estimate >= 1; mass diverges")
        self.P = P
        self.n = n
        self.rho = rho
        self.total_mass = total_mass(P)
        budget = epsilon * self.total_mass
        K = 2
        while n * rho ** (K + 1) / ((K + 1) * (1.0 - rho)) > budget:
            K += 1
            if K > k_cap:
                raise SamplerError(
                    f"length cap {k_cap} cannot reach tail tolerance {epsilon}"
                )
        self.k_max = K
        powers = [np.eye(n), P.copy()]
        for _ in range(2, K + 1):
            powers.append(powers[-1] @ P)
        self.powers = np.stack(powers)              # (K+1, n, n)
        self.traces = np.einsum("kii->k", self.powers)
        # cumulative mu-mass of lengths 2..k, indexed by k
        masses = np.zeros(K + 1)
        ks = np.arange(2, K + 1)
        masses[2:] = self.traces[2:] / ks
        self.cum_mass = np.cumsum(masses)
        # per-length root CDFs: cumsum of diag(P^k) / Tr(P^k)
        diags = np.einsum("kii->ki", self.powers).copy()
        diags[self.traces > 0] /= self.traces[self.traces > 0, None]
        self.root_cdf = np.cumsum(diags, axis=1)    # (K+1, n)

    def trace_residual(self) -> float:
        """Max relative gap between cached traces and fresh products."""
        worst = 0.0
        for k in range(2, self.k_max + 1):
            fresh = float(np.trace(np.linalg.matrix_power(self.P, k)))
            cached = float(self.traces[k])
            if fresh != 0.0:
                worst = max(worst, abs(cached - fresh) / abs(fresh))
        return worst


def stream_generator(seed: int, index: int) -> np.random.Generator:
    """Independent generator for stream/replica `index` under `seed`."""
    # jumped() insists on a builtin int; numpy integers overflow in it
    return np.random.Generator(np.random.Philox(key=int(seed)).jumped(int(index)))


def sample_loop_count(cfg: SoupConfig, P: np.ndarray,
                      rng: np.random.Generator) -> int:
    """Poisson draw of the number of loops, mean lam * total_mass(P)."""
    return int(rng.poisson(cfg.lam * total_mass(P)))


def sample_length(cfg: SoupConfig, cache: PowerCache,
                  rng: np.random.Generator) -> int:
    """Length draw by inverse CDF over p_k = (Tr(P^k)/k)/total_mass.

    The inversion targets the untruncated mass, so the clamp to the cap
    fires with probability at most epsilon and raising the cap never
    reroutes a draw that already landed below it.
    """
    target = rng.random() * cache.total_mass
    k = int(np.searchsorted(cache.cum_mass, target, side="right"))
    return min(max(k, 2), cache.k_max)


def sample_rooted_loop(cache: PowerCache, k: int,
                       rng: np.random.Generator) -> RootedLoop:
    """Markov-bridge draw of a rooted length-k loop.

    Consumes exactly k uniforms: one for the root, one per step except
    the last, which is forced back to the root.
    """
    if not (2 <= k <= cache.k_max):
        raise SamplerError(f"length {k} outside cached range [2, {cache.k_max}]")
    powers = cache.powers
    x0 = int(np.searchsorted(cache.root_cdf[k], rng.random(), side="right"))
    x0 = min(x0, cache.n - 1)
    verts = [x0]
    v = x0
    for r in range(k, 1, -1):
        raw = cache.P[v] * powers[r - 1][:, x0]
        cum = np.cumsum(raw)
        u = rng.random() * cum[-1]
        v = int(np.searchsorted(cum, u, side="right"))
        v = min(v, cache.n - 1)
        verts.append(v)
    return RootedLoop(tuple(verts))


def sample_soup(cfg: SoupConfig, P: np.ndarray,
                rng: np.random.Generator | None = None,
                cache: PowerCache | None = None) -> LoopSoupSample:
    """One soup realization, loops canonicalized to rotation classes.

    With the default rng, stream s of cfg.streams draws an independent
    Poisson(lam * total_mass / streams) batch; concatenation by stream
    index reconstitutes the full-intensity soup exactly (Poisson
    superposition) and is reproducible bit for bit from (seed, streams).

    Draw order per stream: one Poisson count, one uniform per loop for
    its length, then per loop one uniform for the root followed by its
    bridge steps.
    """
    if cache is None:
        cache = PowerCache(P, cfg.epsilon, cfg.k_cap)
    loops: list[UnrootedLoop] = []
    counts: dict[int, int] = {}
    if rng is not None:
        batches = [(rng, cfg.lam)]
    else:
        share = cfg.lam / cfg.streams
        batches = [(stream_generator(cfg.seed, s), share)
                   for s in range(cfg.streams)]
    for gen, lam_share in batches:
        n_loops = int(gen.poisson(lam_share * cache.total_mass))
        lengths = [sample_length(cfg, cache, gen) for _ in range(n_loops)]
        for k in lengths:
            rooted = sample_rooted_loop(cache, k, gen)
            loops.append(UnrootedLoop.from_vertices(rooted.vertices))
            counts[k] = counts.get(k, 0) + 1
    return LoopSoupSample(tuple(loops), cfg.seed, counts)


def sample_soup_functionals(P: np.ndarray, lam: float, weights: np.ndarray,
                            n_replicas: int, seed: int,
                            epsilon: float = 1e-12, k_cap: int = 512,
                            replica_offset: int = 0,
                            cache: PowerCache | None = None) -> np.ndarray:
    """Per-replica sums of edge-linear loop functionals, without
    materializing loops.

    weights has shape (F, n, n); functional m of a loop is the sum of
    weights[m, x_i, x_{i+1}] over the loop's directed steps (wrap-around
    included).  Returns an (n_replicas, F) array whose row j sums the
    functionals over every loop of replica j's soup.  Replica j draws
    from stream_generator(seed, replica_offset + j), so any partition of
    the replica range over workers reproduces the same rows.

    One replica is processed stage by stage: all of its loops advance in
    lockstep through decreasing remaining-step counts, so the work per
    replica is a handful of vectorized operations per stage rather than
    per step of each loop.  Draw order per replica: one Poisson count,
    one uniform vector for all lengths, one for all roots, then one
    uniform vector per stage over the loops still advancing.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 3 or weights.shape[1:] != P.shape:
        raise SamplerError("weights must have shape (F, n, n)")
    if cache is None:
        cache = PowerCache(P, epsilon, k_cap)
    F = weights.shape[0]
    out = np.zeros((n_replicas, F))
    mean = lam * cache.total_mass
    powers = cache.powers
    Pmat = cache.P
    n = cache.n
    for j in range(n_replicas):
        rng = stream_generator(seed, replica_offset + j)
        n_loops = int(rng.poisson(mean))
        if n_loops == 0:
            continue
        targets = rng.random(n_loops) * cache.total_mass
        ks = np.searchsorted(cache.cum_mass, targets, side="right")
        ks = np.clip(ks, 2, cache.k_max)
        u_roots = rng.random(n_loops)
        cdf_rows = cache.root_cdf[ks]
        roots = np.minimum((cdf_rows < u_roots[:, None]).sum(axis=1), n - 1)
        cur = roots.copy()
        acc = np.zeros(F)
        k_top = int(ks.max())
        for r in range(k_top, 1, -1):
            active = np.nonzero(ks >= r)[0]
            x0 = roots[active]
            v = cur[active]
            raw = Pmat[v] * powers[r - 1][:, x0].T
            cum = np.cumsum(raw, axis=1)
            u = rng.random(active.size) * cum[:, -1]
            nxt = np.minimum((cum < u[:, None]).sum(axis=1), n - 1)
            acc += weights[:, v, nxt].sum(axis=1)
            cur[active] = nxt
        acc += weights[:, cur, roots].sum(axis=1)
        out[j] = acc
    return out


def z2_truncation_bound(kappa: float, lam: float, a: int, b: int) -> float:
    """Bound on the expected number of soup loops on the killed lattice
    walk that touch both of two marked sites a and b steps from a vertex:
    (lam kappa / 4) (1 + kappa/4)^{-2(a+b)}.

    Summable over a, b >= 1, so with probability one only finitely many
    loops wind around any fixed vertex (this fails for kappa = 0).
    """
    if kappa <= 0:
        raise SamplerError("the bound requires kappa > 0")
    if a < 1 or b < 1 or lam <= 0:
        raise SamplerError("need a, b >= 1 and lam > 0")
    return (lam * kappa / 4.0) * (1.0 + kappa / 4.0) ** (-2 * (a + b))


def grid_window(n: int, kappa_const: float) -> WeightedGraph:
    """(2n+1) x (2n+1) grid window with constant killing, the finite
    stand-in for the infinite lattice."""
    if n < 1:
        raise SamplerError("window radius n must be >= 1")
    side = 2 * n + 1
    return WeightedGraph.grid(side, side, kappa_const)
