"""Planar maps, cuts, winding numbers, and the winding field.

A combinatorial map is a graph plus a rotation system: the counter-
clockwise cyclic order of neighbours at each vertex.  Faces are the
orbits of the next-edge permutation

    next(u, v) = (v, w),   w = predecessor of u in the rotation at v,

which traverses each face with its interior on the left; a bounded face
is walked counterclockwise, the unbounded face clockwise.  The map is
accepted only if Euler's formula V - E + F = 2 holds, so the rotation
system really describes a sphere/plane embedding.

A cut of a finite face f is the set of primal edges crossed by a dual
path from f to the infinite face, each oriented so that the face the
dual path is leaving lies on its LEFT.  The winding number of a loop
around f is the signed count of cut-edge traversals (+1 along the stored
orientation, -1 against), independent of which dual path was chosen.
A counterclockwise simple loop around f winds +1.

The winding field assigns to each finite face the total winding of all
soup loops.  Its exact characteristic function is a determinant ratio
through the one-form that places +-t_i on the cut edges of face f_i,
and equals a ratio of lattice Gaussian partition functions.  The
high-intensity Gaussian limit has covariance kernel

    K(f, g) = Tr((P . A_f . A_g) G) + Tr((P . A_f) G (P . A_g) G),

the polarization of the variance form sigma^2; the loop-enumeration
oracle fixes both terms' signs (C4 single face: 2/5 - 16/45 = 2/45).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import GraphError, OneForm, WeightedGraph, build_transition, greens_function
from .loops import UnrootedLoop, clt_variance, exact_charfn
from .linalg import logdet_i_minus


class EmbeddingError(ValueError):
    """Rotation system does not describe a planar embedding."""


class CutError(ValueError):
    """Invalid cut request or dual path."""


@dataclass(frozen=True)
class Face:
    """One face: its index and boundary as directed edges, interior on
    the left (so bounded faces read counterclockwise)."""

    index: int
    boundary: tuple[tuple[int, int], ...]

    @property
    def degree(self) -> int:
        return len(self.boundary)


class PlanarMap:
    """A graph embedded in the plane via counterclockwise rotations.

    rotations[v] lists the neighbours of v in counterclockwise order.
    The infinite face is the orbit containing the directed edge
    `infinite_face_edge`; combinatorics alone cannot single it out.
    """

    def __init__(self, graph: WeightedGraph, rotations,
                 infinite_face_edge: tuple[int, int]):
        self.graph = graph
        rots = tuple(tuple(int(w) for w in r) for r in rotations)
        if len(rots) != graph.n:
            raise EmbeddingError("need one rotation per vertex")
        for v in range(graph.n):
            if sorted(rots[v]) != sorted(graph.neighbors(v)):
                raise EmbeddingError(
                    f"rotation at vertex {v} is not a permutation of its neighbours"
                )
        self.rotations = rots
        self._pred = [
            {w: r[(i - 1) % len(r)] for i, w in enumerate(r)} for r in rots
        ]
        self.faces, self.face_left = self._extract_faces()
        F = len(self.faces)
        E = len(graph.edges)
        if graph.n - E + F != 2:
            raise EmbeddingError(
                f"Euler check failed: V-E+F = {graph.n}-{E}+{F} != 2; "
                "the rotation system is not planar"
            )
        u, v = int(infinite_face_edge[0]), int(infinite_face_edge[1])
        if (u, v) not in self.face_left:
            raise EmbeddingError(f"({u},{v}) is not a directed edge of the map")
        self.infinite_face = self.face_left[(u, v)]

    def _extract_faces(self):
        seen = set()
        faces = []
        face_left: dict[tuple[int, int], int] = {}
        darts = [(u, v) for u, v in sorted(self.graph.edges)]
        darts += [(v, u) for u, v in sorted(self.graph.edges)]
        for start in darts:
            if start in seen:
                continue
            orbit = []
            d = start
            while True:
                orbit.append(d)
                seen.add(d)
                u, v = d
                d = (v, self._pred[v][u])
                if d == start:
                    break
                if d in seen:
                    raise EmbeddingError("next-edge map is not a permutation")
            idx = len(faces)
            faces.append(Face(idx, tuple(orbit)))
            for e in orbit:
                face_left[e] = idx
        return tuple(faces), face_left

    @property
    def finite_faces(self) -> tuple[int, ...]:
        return tuple(f.index for f in self.faces if f.index != self.infinite_face)

    def edge_between_faces(self, fa: int, fb: int) -> tuple[int, int] | None:
        """Lowest-indexed primal edge separating faces fa and fb, as the
        directed edge whose left face is fa; None if not adjacent."""
        for u, v in self.graph.edges:
            if self.face_left[(u, v)] == fa and self.face_left[(v, u)] == fb:
                return (u, v)
            if self.face_left[(v, u)] == fa and self.face_left[(u, v)] == fb:
                return (v, u)
        return None

    def dual_neighbors(self, f: int) -> tuple[int, ...]:
        out = set()
        for u, v in self.faces[f].boundary:
            out.add(self.face_left[(v, u)])
        out.discard(f)
        return tuple(sorted(out))

    # ------------------------------------------------------ constructors

    @classmethod
    def grid_map(cls, width: int, height: int, kappa_const: float) -> "PlanarMap":
        """Grid embedded with row-major vertices, x east and y north;
        neighbour order east, north, west, south (counterclockwise).
        The outer face is the one left of the westward edge 1 -> 0."""
        if width < 2 or height < 2:
            raise EmbeddingError("grid maps need width >= 2 and height >= 2")
        g = WeightedGraph.grid(width, height, kappa_const)
        rotations = []
        for r in range(height):
            for c in range(width):
                i = r * width + c
                order = []
                if c + 1 < width:
                    order.append(i + 1)
                if r + 1 < height:
                    order.append(i + width)
                if c > 0:
                    order.append(i - 1)
                if r > 0:
                    order.append(i - width)
                rotations.append(order)
        return cls(g, rotations, (1, 0))

    @classmethod
    def symmetric_grid_map(cls, width: int, height: int,
                           denominator: float = 5.0) -> "PlanarMap":
        """Grid window whose killed walk is symmetric: kappa_x =
        denominator - d_x, so every transition probability is
        1/denominator.  Boundary vertices are killed harder to stand in
        for their missing neighbours, matching the symmetry of the
        constant-killing walk on the full lattice.  Needs denominator
        strictly above the maximum degree."""
        plain = cls.grid_map(width, height, 1.0)
        degrees = plain.graph.degrees
        if denominator <= float(np.max(degrees)):
            raise EmbeddingError("denominator must exceed the maximum degree")
        g = WeightedGraph(plain.graph.n, plain.graph.edges,
                          [denominator - float(d) for d in degrees])
        return cls(g, plain.rotations, (1, 0))

    @classmethod
    def from_dict(cls, d: dict) -> "PlanarMap":
        """JSON schema: {"graph": ..., "rotation": [[edge indices]],
        "infinite_face_edge": [u, v]}; or {"grid": {...}} shorthand."""
        if "grid" in d or ("graph" in d and "grid" in d["graph"]):
            gdata = d.get("graph", d)
            inner = gdata["grid"]
            return cls.grid_map(inner["width"], inner["height"],
                                gdata.get("kappa_const", d.get("kappa_const", 1.0)))
        g = WeightedGraph.from_dict(d["graph"])
        rotations = []
        for v, edge_ids in enumerate(d["rotation"]):
            nbrs = []
            for ei in edge_ids:
                a, b = g.edges[ei]
                if v not in (a, b):
                    raise EmbeddingError(
                        f"rotation at vertex {v} lists edge {ei} not incident to it"
                    )
                nbrs.append(b if v == a else a)
            rotations.append(nbrs)
        return cls(g, rotations, tuple(d["infinite_face_edge"]))

    @classmethod
    def from_json(cls, text: str) -> "PlanarMap":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Cut:
    """Oriented primal edges crossed by a dual path from `face` to the
    infinite face; each stored (e_minus, e_plus) has the face the path is
    leaving on its left."""

    face: int
    oriented_edges: tuple[tuple[int, int], ...]
    dual_path: tuple[int, ...]


def extract_faces(pmap: PlanarMap) -> tuple[Face, ...]:
    """The map's faces (already computed and Euler-checked at build)."""
    return pmap.faces


def build_cut(pmap: PlanarMap, face: int, dual_path_hint=None) -> Cut:
    """Cut from `face` to the infinite face.

    The default dual path is breadth-first (ties broken by face index);
    a hint is any face sequence from `face` to the infinite face with
    consecutive faces adjacent and no repeats.  Every valid path yields
    the same winding numbers, so the choice is free.
    """
    if face == pmap.infinite_face:
        raise CutError("cuts are defined for finite faces only")
    if not (0 <= face < len(pmap.faces)):
        raise CutError(f"no face {face}")
    if dual_path_hint is not None:
        path = tuple(int(f) for f in dual_path_hint)
        if path[0] != face or path[-1] != pmap.infinite_face:
            raise CutError("hint must run from the face to the infinite face")
        if len(set(path)) != len(path):
            raise CutError("hint revisits a face")
        for a, b in zip(path, path[1:]):
            if b not in pmap.dual_neighbors(a):
                raise CutError(f"faces {a} and {b} are not adjacent in the dual")
    else:
        parent: dict[int, int] = {pmap.infinite_face: -1}
        queue = deque([pmap.infinite_face])
        while queue:
            g = queue.popleft()
            for h in pmap.dual_neighbors(g):
                if h not in parent:
                    parent[h] = g
                    queue.append(h)
        if face not in parent:
            raise CutError("face is not connected to the infinite face in the dual")
        chain = [face]
        while chain[-1] != pmap.infinite_face:
            chain.append(parent[chain[-1]])
        path = tuple(chain)
    oriented = tuple(pmap.edge_between_faces(a, b) for a, b in zip(path, path[1:]))
    return Cut(face, oriented, path)


def winding_number(loop, cut: Cut) -> int:
    """Signed crossings of the cut: +1 per traversal along a stored
    oriented edge, -1 against it."""
    signs = {}
    for x, y in cut.oriented_edges:
        signs[(x, y)] = 1
        signs[(y, x)] = -1
    verts = loop.vertices if isinstance(loop, UnrootedLoop) else tuple(loop)
    k = len(verts)
    return sum(signs.get((verts[i], verts[(i + 1) % k]), 0) for i in range(k))


@dataclass(frozen=True)
class WindingFieldSample:
    """Realized winding field: finite-face index -> integer total."""

    values: dict[int, int]

    def __getitem__(self, face: int) -> int:
        return self.values[face]


def field_sample(soup, cuts) -> WindingFieldSample:
    """Sum of loop winding numbers per face, one cut per face."""
    values = {cut.face: 0 for cut in cuts}
    for cut in cuts:
        values[cut.face] = sum(winding_number(lp, cut) for lp in soup.loops)
    return WindingFieldSample(values)


@dataclass(frozen=True)
class CutOneForm:
    """The one-form with +-t_i on the cut edges of face f_i, summed
    entrywise over faces when cuts overlap."""

    faces: tuple[int, ...]
    ts: tuple[float, ...]
    one_form: OneForm

    @classmethod
    def build(cls, pmap: PlanarMap, faces, ts, cuts=None) -> "CutOneForm":
        faces = tuple(int(f) for f in faces)
        ts = tuple(float(t) for t in ts)
        if len(faces) != len(ts):
            raise CutError("need one weight per face")
        if cuts is None:
            cuts = [build_cut(pmap, f) for f in faces]
        entries: dict[tuple[int, int], float] = {}
        for cut, t in zip(cuts, ts):
            for x, y in cut.oriented_edges:
                key, val = ((x, y), t) if x < y else ((y, x), -t)
                entries[key] = entries.get(key, 0.0) + val
        entries = {k: v for k, v in entries.items() if v != 0.0}
        return cls(faces, ts, OneForm(pmap.graph, entries))


def cut_weight_matrices(pmap: PlanarMap, cuts) -> np.ndarray:
    """Stack of (n, n) matrices, one per cut, with +-1 on its oriented
    edges: the edge-linear functionals computing winding numbers, in the
    shape the soup sampler's fast path consumes."""
    n = pmap.graph.n
    out = np.zeros((len(cuts), n, n))
    for i, cut in enumerate(cuts):
        for x, y in cut.oriented_edges:
            out[i, x, y] = 1.0
            out[i, y, x] = -1.0
    return out


def winding_charfn_exact(pmap: PlanarMap, faces, ts, lam: float,
                         cuts=None) -> complex:
    """E[exp(i sum_i t_i W_lam(f_i))] as a determinant ratio."""
    form = CutOneForm.build(pmap, faces, ts, cuts)
    P = build_transition(pmap.graph)
    return exact_charfn(P, form.one_form, 1.0, lam)


def covariance_kernel(pmap: PlanarMap, f: int, g: int,
                      cut_f: Cut | None = None, cut_g: Cut | None = None) -> float:
    """Gaussian-limit covariance K(f, g) of the scaled winding field.

    The polarization of the variance form sigma^2 in its bilinear trace
    shape; symmetric, cut-independent, and K(f, f) = sigma^2(A_f) >= 0.
    """
    cut_f = cut_f or build_cut(pmap, f)
    cut_g = cut_g or build_cut(pmap, g)
    Af = CutOneForm.build(pmap, (f,), (1.0,), (cut_f,)).one_form.matrix
    Ag = CutOneForm.build(pmap, (g,), (1.0,), (cut_g,)).one_form.matrix
    P = build_transition(pmap.graph)
    G = greens_function(P)
    Mf = P * Af
    Mg = P * Ag
    return float(np.trace((P * Af * Ag) @ G) + np.trace(Mf @ G @ Mg @ G))


def two_point_direct(pmap: PlanarMap, f: int, g: int,
                     cut_f: Cut | None = None, cut_g: Cut | None = None) -> float:
    """Second winding moment at unit intensity by explicit crossing
    counts over the two cuts' Green's products:

        2 sum_{e1 in cut(f), e2 in cut(g)} P_{e1} P_{e2}
            (G_{e1+ e2-} G_{e2+ e1-} - G_{e1+ e2+} G_{e2- e1-})

    plus, when f = g, the same-edge diagonal Tr((P . A_f . A_f) G); with
    that diagonal the total equals the kernel for edge-disjoint cuts.

    Requires a symmetric transition matrix: the collapse of the four
    crossing-moment products into a single prefactor uses P_xy = P_yx,
    and on graphs where it fails (e.g. constant killing with unequal
    degrees) the expression provably disagrees with the enumeration-
    verified kernel.  Use symmetric_grid_map for windows.
    """
    cut_f = cut_f or build_cut(pmap, f)
    cut_g = cut_g or build_cut(pmap, g)
    P = build_transition(pmap.graph)
    if np.max(np.abs(P - P.T)) > 1e-12:
        raise CutError(
            "the crossing-count two-point formula requires a symmetric "
            "transition matrix"
        )
    G = greens_function(P)
    total = 0.0
    for a_minus, a_plus in cut_f.oriented_edges:
        for b_minus, b_plus in cut_g.oriented_edges:
            total += 2.0 * P[a_minus, a_plus] * P[b_minus, b_plus] * (
                G[a_plus, b_minus] * G[b_plus, a_minus]
                - G[a_plus, b_plus] * G[b_minus, a_minus]
            )
    if f == g:
        for x, y in cut_f.oriented_edges:
            total += P[x, y] * G[y, x] + P[y, x] * G[x, y]
    return float(total)


def gff_partition_ratio(pmap: PlanarMap, faces, ts, lam: float,
                        cuts=None) -> complex:
    """(Z_twisted / Z)^(2 lam) for the lattice Gaussian with covariance
    G, the twist multiplying each edge coupling by the cut phase.

    log Z = (1/2) sum_x log(2 pi / (kappa_x + d_x)) - (1/2) log det(I - P^t);
    the vertex prefactors cancel in the ratio, leaving the same
    determinant ratio as the winding characteristic function.
    """
    form = CutOneForm.build(pmap, faces, ts, cuts)
    g = pmap.graph
    P = build_transition(g)
    Pt = P * np.exp(1j * form.one_form.matrix)
    prefactor = 0.5 * float(
        np.sum(np.log(2.0 * np.pi / (np.asarray(g.kappa) + g.degrees)))
    )
    log_z_twisted = prefactor - 0.5 * logdet_i_minus(Pt)
    log_z = prefactor - 0.5 * logdet_i_minus(P)
    return complex(np.exp(2.0 * lam * (log_z_twisted - log_z)))
