"""Weighted graphs with killing, transition and Green's matrices, one-forms.

A walk on a finite connected graph jumps from x to a uniformly chosen
neighbour with probability 1/(kappa_x + d_x) per neighbour and dies with
the remaining probability kappa_x/(kappa_x + d_x).  The killing function
kappa must be nonzero somewhere, otherwise the walk never dies, the
transition matrix P has spectral radius 1, and every loop-measure
quantity downstream diverges.  That constraint is enforced here, at
construction, so the rest of the package can assume rho(P) < 1.

The Green's function G = (I - P)^{-1} collects the expected visit counts
of the killed walk and satisfies the reversibility identity
G_xy P_yx = G_yx P_xy (the walk is reversible w.r.t. kappa_x + d_x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class GraphError(ValueError):
    """Invalid graph construction or graph/matrix mismatch."""


@dataclass(frozen=True)
class WeightedGraph:
    """Finite connected simple graph with a killing function.

    Parameters
    ----------
    n : vertex count; vertices are 0..n-1 (insertion order is the fixed
        ordering used by every matrix and report downstream).
    edges : iterable of unordered vertex pairs; no self-loops, no
        multi-edges.
    kappa : per-vertex nonnegative killing rates, > 0 somewhere.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    kappa: tuple[float, ...]
    _adj: tuple[tuple[int, ...], ...] = field(repr=False, compare=False, default=())

    def __init__(self, n, edges, kappa):
        n = int(n)
        if n < 1:
            raise GraphError("vertex count must be >= 1")
        seen = set()
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"multi-edge ({u},{v})")
            seen.add(key)
            norm.append(key)
        kap = tuple(float(k) for k in kappa)
        if len(kap) != n:
            raise GraphError(f"kappa has length {len(kap)}, expected {n}")
        if any(k < 0 for k in kap):
            raise GraphError("kappa must be nonnegative")
        if all(k == 0 for k in kap):
            raise GraphError("kappa is identically zero; the walk must be killed somewhere")
        adj = [[] for _ in range(n)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        # connectivity (n=1 is trivially connected)
        stack, comp = [0], {0}
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        if len(comp) != n:
            raise GraphError("graph is not connected")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "kappa", kap)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=float)

    def neighbors(self, x: int) -> tuple[int, ...]:
        return self._adj[x]

    def is_adjacent(self, x: int, y: int) -> bool:
        return y in self._adj[x]

    @classmethod
    def grid(cls, width: int, height: int, kappa_const: float) -> "WeightedGraph":
        """width x height grid graph with constant killing, row-major indexing."""
        if width < 1 or height < 1:
            raise GraphError("grid dimensions must be >= 1")
        edges = []
        for r in range(height):
            for c in range(width):
                i = r * width + c
                if c + 1 < width:
                    edges.append((i, i + 1))
                if r + 1 < height:
                    edges.append((i, i + width))
        n = width * height
        return cls(n, edges, [kappa_const] * n)

    @classmethod
    def from_dict(cls, d: dict) -> "WeightedGraph":
        """Build from the JSON schema: either explicit vertices/edges/kappa
        or the grid shorthand {"grid": {"width": W, "height": H}, "kappa_const": c}."""
        if "grid" in d:
            g = d["grid"]
            return cls.grid(g["width"], g["height"], d["kappa_const"])
        return cls(d["vertices"], [tuple(e) for e in d["edges"]], d["kappa"])

    @classmethod
    def from_json(cls, text: str) -> "WeightedGraph":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "vertices": self.n,
            "edges": [list(e) for e in self.edges],
            "kappa": list(self.kappa),
        }


def build_transition(g: WeightedGraph) -> np.ndarray:
    """Transition matrix P with P_xy = 1/(kappa_x + d_x) for adjacent x,y."""
    deg = g.degrees
    P = np.zeros((g.n, g.n))
    for u, v in g.edges:
        P[u, v] = 1.0 / (g.kappa[u] + deg[u])
        P[v, u] = 1.0 / (g.kappa[v] + deg[v])
    return P


def greens_function(P: np.ndarray) -> np.ndarray:
    """G = (I - P)^{-1}; raises if I - P is numerically singular."""
    n = P.shape[0]
    try:
        G = np.linalg.inv(np.eye(n) - P)
    except np.linalg.LinAlgError as exc:
        raise GraphError(
            "I - P is singular; the killing constraint (kappa > 0 somewhere) "
            "was violated numerically"
        ) from exc
    return G


@dataclass(frozen=True)
class OneForm:
    """Skew-symmetric edge weights: A_xy = -A_yx on edges, 0 off edges.

    The line integral of A along a loop is the cyclic sum of its entries
    over the traversed directed edges.
    """

    graph: WeightedGraph
    matrix: np.ndarray

    def __init__(self, graph: WeightedGraph, entries: dict[tuple[int, int], float]):
        A = np.zeros((graph.n, graph.n))
        for (u, v), a in entries.items():
            if not graph.is_adjacent(u, v):
                raise GraphError(f"one-form entry on non-edge ({u},{v})")
            A[u, v] += float(a)
            A[v, u] -= float(a)
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "matrix", A)
        A.setflags(write=False)

    @classmethod
    def zero(cls, graph: WeightedGraph) -> "OneForm":
        return cls(graph, {})

    @classmethod
    def from_matrix(cls, graph: WeightedGraph, A: np.ndarray) -> "OneForm":
        A = np.asarray(A, dtype=float)
        if A.shape != (graph.n, graph.n):
            raise GraphError("one-form matrix has wrong shape")
        if np.max(np.abs(A + A.T)) > 1e-12:
            raise GraphError("one-form matrix is not skew-symmetric")
        mask = np.ones_like(A, dtype=bool)
        for u, v in graph.edges:
            mask[u, v] = mask[v, u] = False
        if np.any(A[mask] != 0.0):
            raise GraphError("one-form matrix supported off the edge set")
        return cls(graph, {(u, v): A[u, v] for u, v in graph.edges})

    def __add__(self, other: "OneForm") -> "OneForm":
        if other.graph is not self.graph and other.graph != self.graph:
            raise GraphError("one-forms live on different graphs")
        return OneForm.from_matrix(self.graph, self.matrix + other.matrix)

    def __mul__(self, c: float) -> "OneForm":
        return OneForm.from_matrix(self.graph, self.matrix * float(c))

    __rmul__ = __mul__


def perturbed_transition(P: np.ndarray, A: OneForm | np.ndarray, beta: float) -> np.ndarray:
    """P^beta with entries e^{i beta A_xy} / (kappa_x + d_x) on edges.

    Since P already carries the 1/(kappa+d) weights and A vanishes off the
    edge set, this is the entrywise product P * exp(i beta A).  beta = 0
    returns P itself (real, exactly).
    """
    Am = A.matrix if isinstance(A, OneForm) else np.asarray(A)
    if Am.shape != P.shape:
        raise GraphError("one-form and transition matrix dimensions differ")
    if beta == 0.0:
        return P.copy()
    return P * np.exp(1j * beta * Am)
