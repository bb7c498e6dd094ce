"""Loop measure, exact characteristic functionals, and the Gaussian limit.

A rooted loop of length k is a closed walk (x_0, ..., x_{k-1}) with the
wrap-around step x_{k-1} -> x_0; its weight is (1/k) times the product
of the k transition entries.  The loop measure mu assigns to each
rotation class the sum of its distinct rooted representatives' weights,
which works out to (product of P entries) / m where m is the number of
rotations fixing the sequence (m > 1 only for periodic words).

Three independent computations of the same quantities live here:

* determinant ratios (exact_charfn, total_mass) through log det(I - P);
* trace/quadratic forms (clt_variance and friends);
* brute-force enumeration of rooted closed walks (the oracle that
  arbitrates sign and factor choices in the closed forms).

The variance of the Gaussian limit is

    sigma^2(A) = Tr((P . A^{.2}) G) + Tr((P . A) G (P . A) G)

with BOTH terms carrying the same sign; the enumeration oracle confirms
this on K3 (1/8) and C4 (2/45).  (Here "." is the entrywise product.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import OneForm, perturbed_transition
from .linalg import logdet_i_minus, spectral_radius_power_iteration


class LoopError(ValueError):
    """Invalid loop for the given transition matrix."""


class EnumerationCapError(RuntimeError):
    """The walk tree exceeded the configured node cap."""


def _form_matrix(A) -> np.ndarray:
    return A.matrix if isinstance(A, OneForm) else np.asarray(A)


# ---------------------------------------------------------------- loops

@dataclass(frozen=True)
class RootedLoop:
    """Closed walk (x_0, ..., x_{k-1}) with implicit step x_{k-1} -> x_0."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise LoopError("loops have length >= 2")

    @property
    def length(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class UnrootedLoop:
    """Rotation class: lexicographically minimal rotation, plus the
    number m of rotations fixing the sequence (m divides the length)."""

    vertices: tuple[int, ...]
    multiplicity: int

    @classmethod
    def from_vertices(cls, seq) -> "UnrootedLoop":
        seq = tuple(int(v) for v in seq)
        k = len(seq)
        if k < 2:
            raise LoopError("loops have length >= 2")
        rotations = [seq[i:] + seq[:i] for i in range(k)]
        canonical = min(rotations)
        m = sum(1 for r in rotations if r == seq)
        return cls(canonical, m)

    @property
    def length(self) -> int:
        return len(self.vertices)


def loop_integral(vertices, A) -> float:
    """Cyclic sum of one-form entries along the loop: the line integral."""
    Am = _form_matrix(A)
    k = len(vertices)
    return float(sum(Am[vertices[i], vertices[(i + 1) % k]] for i in range(k)))


def rooted_weight(loop: RootedLoop | tuple, P: np.ndarray) -> float:
    """(1/k) * product of the k transition entries around the loop."""
    verts = loop.vertices if isinstance(loop, RootedLoop) else tuple(loop)
    k = len(verts)
    prod = 1.0
    for i in range(k):
        p = P[verts[i], verts[(i + 1) % k]]
        if p == 0.0:
            raise LoopError(
                f"consecutive pair ({verts[i]},{verts[(i + 1) % k]}) is not an edge"
            )
        prod *= p
    return prod / k


def mu_of_unrooted(loop: UnrootedLoop, P: np.ndarray) -> float:
    """mu(class) = (k/m) * rooted weight = (product of P entries) / m."""
    k = loop.length
    return rooted_weight(RootedLoop(loop.vertices), P) * k / loop.multiplicity


# ------------------------------------------------------ exact formulas

def length_mass(P: np.ndarray, k: int) -> float:
    """Total mu-mass of loops of length k: Tr(P^k) / k."""
    if k < 2:
        raise ValueError("loops have length >= 2")
    return float(np.trace(np.linalg.matrix_power(P, k))) / k


def total_mass(P: np.ndarray) -> float:
    """mu-mass of all loops: -log det(I - P).

    Equals sum_{k>=2} Tr(P^k)/k because Tr(P) = 0 (no self-loops), so the
    k=1 term of the log series vanishes.
    """
    return float(-logdet_i_minus(P).real)


def exact_charfn(P: np.ndarray, A, beta: float, lam: float) -> complex:
    """E[e^{i beta sum of loop integrals}] = (det(I-P^beta)/det(I-P))^{-lam}.

    Computed in log space on the branch matching the Campbell series, so
    the value is correct for any real lam > 0.
    """
    if lam <= 0:
        raise ValueError("intensity lam must be > 0")
    Pb = perturbed_transition(P, _form_matrix(A), beta)
    return complex(np.exp(-lam * (logdet_i_minus(Pb) - logdet_i_minus(P))))


def clt_variance(P: np.ndarray, G: np.ndarray, A) -> float:
    """Limit variance sigma^2(A) of the scaled one-form sum.

    sigma^2(A) = Tr((P . A^{.2}) G) + Tr((P . A) G (P . A) G); both terms
    enter with the same sign (enumeration-verified).
    """
    Am = _form_matrix(A)
    M = P * Am
    t1 = float(np.trace((P * Am * Am) @ G))
    t2 = float(np.trace(M @ G @ M @ G))
    return t1 + t2


def clt_limit_charfn(P: np.ndarray, G: np.ndarray, A, s: float) -> float:
    """High-intensity limit: exp(-s^2 sigma^2(A) / 2)."""
    return math.exp(-0.5 * s * s * clt_variance(P, G, A))


def trace_identity_residual(P: np.ndarray, G: np.ndarray, A, B) -> float:
    """|quartic Green's sum - Tr[(P.A)G(P.B)G]| for symmetric P.

    The quartic side is (1/2) sum over ordered adjacent pairs (x0,x1),
    (x2,x3) of P P A B [G_{x0x3}G_{x1x2} - G_{x0x2}G_{x1x3}]; the identity
    requires P symmetric.
    """
    if np.max(np.abs(P - P.T)) > 1e-12:
        raise ValueError("trace identity requires a symmetric transition matrix")
    M = P * _form_matrix(A)
    N = P * _form_matrix(B)
    term1 = float(np.sum((M @ G @ N) * G))
    term2 = float(np.sum(M * (G @ N @ G.T)))
    rhs = float(np.trace(M @ G @ N @ G))
    return abs(0.5 * (term1 - term2) - rhs)


# ------------------------------------------------------- tail control

def tail_bound(P: np.ndarray, k_max: int, rho: float | None = None) -> float:
    """Upper bound on the mu-mass beyond length k_max.

    sum_{k > k_max} n * rho_hat^k / k with rho_hat a power-iteration
    estimate inflated by a 1.01 safety factor.  Also bounds truncation
    errors of charfn logs since |e^{i theta} - 1| <= 2 <= n at desk scale.
    """
    n = P.shape[0]
    if rho is None:
        rho = 1.01 * spectral_radius_power_iteration(P)
    if rho >= 1.0:
        raise ValueError("spectral radius estimate >= 1; no geometric tail")
    total = 0.0
    term_pow = rho ** (k_max + 1)
    k = k_max + 1
    while True:
        term = n * term_pow / k
        total += term
        if term < 1e-18 * total or term < 1e-300:
            return total
        term_pow *= rho
        k += 1


# ---------------------------------------------------------- the oracle

def iter_rooted_loops(P: np.ndarray, k_max: int, cap: int = 20_000_000):
    """Yield (vertex tuple, product of P entries) for every rooted closed
    walk of length 2..k_max, by depth-first extension.

    Prunes branches that cannot return to their root within k_max steps
    (graph-distance bound).  Raises EnumerationCapError if the walk tree
    exceeds `cap` nodes.
    """
    n = P.shape[0]
    adj = [np.nonzero(P[i])[0].tolist() for i in range(n)]
    dist = _distance_matrix(adj)
    nodes = 0
    for x0 in range(n):
        d0 = dist[x0]
        stack = [(x0, (x0,), 1.0)]
        while stack:
            v, path, prod = stack.pop()
            depth = len(path)
            if depth >= 2 and P[v, x0] > 0.0:
                yield path, prod * P[v, x0]
            if depth < k_max:
                for u in adj[v]:
                    if depth + d0[u] > k_max:
                        continue
                    nodes += 1
                    if nodes > cap:
                        raise EnumerationCapError(
                            f"walk tree exceeded {cap} nodes at k_max={k_max}"
                        )
                    stack.append((u, path + (u,), prod * P[v, u]))


def _distance_matrix(adj) -> list[list[int]]:
    n = len(adj)
    big = n + 1
    out = []
    for s in range(n):
        d = [big] * n
        d[s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if d[y] > d[x] + 1:
                        d[y] = d[x] + 1
                        nxt.append(y)
            frontier = nxt
        out.append(d)
    return out


def enumerate_loops(P: np.ndarray, k_max: int, cap: int = 20_000_000):
    """Stream (UnrootedLoop, mu weight), each rotation class exactly once.

    A rooted walk is emitted only when its sequence equals the minimal
    rotation of its class, so no dedup set is needed.
    """
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    for path, prod in iter_rooted_loops(P, k_max, cap):
        k = len(path)
        rotations = [path[i:] + path[:i] for i in range(k)]
        if min(rotations) != path:
            continue
        m = sum(1 for r in rotations if r == path)
        yield UnrootedLoop(path, m), prod / m


def charfn_log_enumeration(P: np.ndarray, A, beta: float, k_max: int,
                           cap: int = 20_000_000) -> complex:
    """Oracle partial sum of the charfn exponent at lam = 1:

    sum over rooted loops of length <= k_max of (1/k) prod(P) (e^{i beta int A} - 1),
    which converges to -[log det(I-P^beta) - log det(I-P)].
    """
    Am = _form_matrix(A)
    total = 0.0 + 0.0j
    for path, prod in iter_rooted_loops(P, k_max, cap):
        k = len(path)
        s = loop_integral(path, Am)
        total += (prod / k) * (np.exp(1j * beta * s) - 1.0)
    return complex(total)


def enumeration_second_moment(P: np.ndarray, A, B, k_max: int,
                              cap: int = 20_000_000) -> float:
    """Oracle partial sum of int (int_gamma A)(int_gamma B) d mu.

    With A = B this approaches sigma^2(A) from below.
    """
    Am = _form_matrix(A)
    Bm = _form_matrix(B)
    same = Am is Bm or np.array_equal(Am, Bm)
    total = 0.0
    for path, prod in iter_rooted_loops(P, k_max, cap):
        k = len(path)
        sa = loop_integral(path, Am)
        sb = sa if same else loop_integral(path, Bm)
        total += (prod / k) * sa * sb
    return total
