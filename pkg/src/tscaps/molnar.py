"""Delaunay and Molnar decompositions of point systems on the sphere.

The Delaunay cells are the radial projections of the faces of conv(X).  A
cell whose circumcenter lies outside it has a separating side; replacing each
such side by the two arcs through the circumcenter (a bridge) gives the Molnar
decomposition.  The refined decomposition fans every large cell from its
circumcenter and tags the pieces as type A or type B.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .core import SphericalCap, Tolerances, sdist, tolerances, unit, vertex_angle
from .errors import BridgeCrossing, ClassificationFailure, DegeneratePointSystem, OutOfDomain


@dataclass
class DCell:
    vertices: tuple  # point indices, counterclockwise
    coords: np.ndarray
    cap: SphericalCap  # circumcap; center is o_F
    separating_side: int | None  # side k runs from vertices[k] to vertices[k+1]

    @property
    def center(self) -> np.ndarray:
        return self.cap.vec

    @property
    def radius(self) -> float:
        return self.cap.radius

    def side(self, k: int) -> tuple:
        return self.vertices[k], self.vertices[(k + 1) % len(self.vertices)]

    def inward_poles(self) -> np.ndarray:
        N = np.cross(self.coords, np.roll(self.coords, -1, axis=0))
        return N / np.linalg.norm(N, axis=1, keepdims=True)

    @property
    def area(self) -> float:
        return region_area(self.coords)


@dataclass
class Region:
    """Simple spherical polygon, possibly non-convex, counterclockwise."""

    coords: np.ndarray
    labels: tuple  # ("p", point index) or ("o", D-cell index) per vertex

    @property
    def angles(self) -> list:
        V = self.coords
        s = len(V)
        return [vertex_angle(V[i - 1], V[i], V[(i + 1) % s]) for i in range(s)]

    @property
    def area(self) -> float:
        return region_area(self.coords)

    @property
    def phi(self) -> float:
        """Sum of the interior angles at vertices that are points of the system."""
        return sum(a for a, lab in zip(self.angles, self.labels) if lab[0] == "p")


@dataclass
class MCell(Region):
    pass


@dataclass
class RefinedCell(Region):
    kind: str = "typeB"  # "typeA", "typeB" or "untouched"
    source: int = -1  # index of the D-cell this piece came from
    apexes: tuple = ()  # circumcenters used as apexes (D-cell indices)


@dataclass
class Decomposition:
    points: np.ndarray
    dcells: list
    mcells: list = field(default_factory=list)
    refined: list = field(default_factory=list)
    rho: float | None = None


def region_area(V: np.ndarray) -> float:
    s = len(V)
    return float(sum(vertex_angle(V[i - 1], V[i], V[(i + 1) % s]) for i in range(s)) - (s - 2) * math.pi)


def _frame(v):
    a = np.zeros(3)
    a[int(np.argmin(np.abs(v)))] = 1.0
    e1 = unit(a - np.dot(a, v) * v)
    return e1, np.cross(v, e1)


def _ccw_order(idx, P, axis) -> list:
    e1, e2 = _frame(axis)
    return sorted(idx, key=lambda i: math.atan2(float(P[i] @ e2), float(P[i] @ e1)))


def as_point_system(points) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.ndim != 2 or P.shape[1] != 3 or len(P) < 4:
        raise DegeneratePointSystem("need at least four points in R^3")
    return P / np.linalg.norm(P, axis=1, keepdims=True)


def delaunay(points, tol: Tolerances | None = None) -> list:
    """Delaunay cells of a point system whose hull contains the origin inside."""
    tol = tol or tolerances()
    P = as_point_system(points)
    try:
        hull = ConvexHull(P)
    except QhullError as exc:
        raise DegeneratePointSystem(f"convex hull failed: {exc}") from exc
    eq = hull.equations
    if np.any(eq[:, 3] > -tol.angle):
        raise DegeneratePointSystem("origin is not interior to the convex hull")

    # merge coplanar neighbouring facets (concyclic points on the sphere)
    nf = len(eq)
    parent = list(range(nf))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for f in range(nf):
        for g in hull.neighbors[f]:
            if g > f and np.dot(eq[f, :3], eq[g, :3]) > 1 - 1e-12 and abs(eq[f, 3] - eq[g, 3]) < tol.merge:
                parent[find(g)] = find(f)
    groups: dict = {}
    for f in range(nf):
        groups.setdefault(find(f), []).append(f)

    cells = []
    for root, fs in groups.items():
        n = unit(eq[fs, :3].mean(axis=0))
        h = float(-eq[fs, 3].mean())
        idx = sorted({int(i) for f in fs for i in hull.simplices[f]})
        idx = _ccw_order(idx, P, n)
        k = int(np.argmin(idx))
        idx = idx[k:] + idx[:k]
        coords = P[idx]
        cap = SphericalCap(tuple(n), math.acos(max(-1.0, min(1.0, h))))
        cell = DCell(tuple(idx), coords, cap, None)
        cells.append(cell)
    cells.sort(key=lambda c: c.vertices)
    for c in cells:
        c.separating_side = _separating_side(c, tol)
    return cells


def _separating_side(cell: DCell, tol: Tolerances):
    s = cell.inward_poles() @ cell.center
    k = int(np.argmin(s))
    if s[k] < -math.sin(tol.angle):
        return k
    return None


def side_map(cells: Sequence[DCell]) -> dict:
    """Directed side (i, j) -> (cell index, side index)."""
    out = {}
    for c, cell in enumerate(cells):
        for k in range(len(cell.vertices)):
            out[cell.side(k)] = (c, k)
    return out


# ---------------------------------------------------------------------------
# Molnar decomposition
# ---------------------------------------------------------------------------

def _strictly_on_arc(x, a, b, n, eps) -> bool:
    return float(np.dot(np.cross(a, x), n)) > eps and float(np.dot(np.cross(x, b), n)) > eps


def arcs_cross(a, b, c, d, eps: float = 1e-10) -> bool:
    """True when minor arcs ab and cd share a point other than a common endpoint."""
    n1 = np.cross(a, b)
    n2 = np.cross(c, d)
    n1 = n1 / np.linalg.norm(n1)
    n2 = n2 / np.linalg.norm(n2)
    x = np.cross(n1, n2)
    nx = np.linalg.norm(x)
    if nx < 1e-12:
        # same great circle: overlap iff an endpoint is interior to the other arc
        return any(_strictly_on_arc(p, a, b, n1, eps) for p in (c, d)) or any(
            _strictly_on_arc(p, c, d, n1, eps) for p in (a, b)
        ) or (sdist(a, c) < eps and sdist(b, d) < eps) or (sdist(a, d) < eps and sdist(b, c) < eps)
    x = x / nx
    for y in (x, -x):
        if _strictly_on_arc(y, a, b, n1, eps) and _strictly_on_arc(y, c, d, n2, eps):
            return True
    return False


def _trace(V: np.ndarray, edges: list) -> list:
    """Faces (lists of vertex indices, counterclockwise) of an embedded graph of minor arcs."""
    around = [[] for _ in range(len(V))]
    for e, (u, v) in enumerate(edges):
        for d, (a, b) in ((2 * e, (u, v)), (2 * e + 1, (v, u))):
            f1, f2 = _frame(V[a])
            t = V[b] - np.dot(V[a], V[b]) * V[a]
            around[a].append((math.atan2(float(t @ f2), float(t @ f1)), d))
    pos = {}
    for a in range(len(V)):
        around[a].sort()
        for i, (_, d) in enumerate(around[a]):
            pos[d] = (a, i)
    seen = set()
    faces = []
    for d0 in range(2 * len(edges)):
        if d0 in seen:
            continue
        face = []
        d = d0
        while d not in seen:
            seen.add(d)
            u, v = edges[d // 2]
            face.append(u if d % 2 == 0 else v)
            a, i = pos[d ^ 1]
            d = around[a][(i - 1) % len(around[a])][1]
        faces.append(face)
    return faces


def bridges(cells: Sequence[DCell]) -> list:
    """(cell index, i, j) for each separating side p_i p_j."""
    out = []
    for c, cell in enumerate(cells):
        if cell.separating_side is not None:
            i, j = cell.side(cell.separating_side)
            out.append((c, i, j))
    return out


def molnar(cells: Sequence[DCell], check: bool = True) -> list:
    """Replace separating sides by bridges and trace the resulting cells."""
    npts = 1 + max(max(c.vertices) for c in cells)
    P = np.zeros((npts, 3))
    for cell in cells:
        P[list(cell.vertices)] = cell.coords
    sep = {}
    for c, i, j in bridges(cells):
        sep[frozenset((i, j))] = c
    V = [P[i] for i in range(npts)]
    labels = [("p", i) for i in range(npts)]
    node = {}
    for c in sorted(set(sep.values())):
        node[c] = len(V)
        V.append(cells[c].center)
        labels.append(("o", c))
    V = np.array(V)
    edges = []
    seen = set()
    for cell in cells:
        for k in range(len(cell.vertices)):
            i, j = cell.side(k)
            key = frozenset((i, j))
            if key in seen or key in sep:
                continue
            seen.add(key)
            edges.append((i, j))
    bridge_edges = []
    for key, c in sorted(sep.items(), key=lambda kv: kv[1]):
        i, j = sorted(key)
        bridge_edges += [(i, node[c]), (node[c], j)]
    if check:
        _check_bridges(V, edges, bridge_edges)
    faces = _trace(V, edges + bridge_edges)
    out = []
    for f in faces:
        k = int(np.argmin(f))
        f = f[k:] + f[:k]
        out.append(MCell(V[f], tuple(labels[i] for i in f)))
    out.sort(key=lambda m: m.labels)
    return out


def _check_bridges(V, edges, bridge_edges):
    all_edges = edges + bridge_edges
    for b, (u, v) in enumerate(bridge_edges):
        for e, (x, y) in enumerate(all_edges):
            if e == len(edges) + b:
                continue
            if arcs_cross(V[u], V[v], V[x], V[y]):
                raise BridgeCrossing(f"bridge arc {(u, v)} meets arc {(x, y)} away from endpoints")


def neighbor_radius_check(cells: Sequence[DCell]) -> bool:
    """Across a separating side, the neighbouring cell has the strictly larger circumradius."""
    sm = side_map(cells)
    for c, i, j in bridges(cells):
        other = sm[(j, i)][0]
        if not cells[other].radius > cells[c].radius:
            return False
    return True


# ---------------------------------------------------------------------------
# Refined decomposition
# ---------------------------------------------------------------------------

def R_rho(rho: float) -> float:
    if not 0.0 < rho < math.pi / 4:
        raise OutOfDomain("need 0 < rho < pi/4")
    return math.asin(math.sqrt(2) * math.sin(rho))


def refine(cells: Sequence[DCell], rho: float, strict: bool = True, tol: Tolerances | None = None) -> list:
    """Refined decomposition; every piece is tagged typeA or typeB.

    Pieces that fit neither description raise ClassificationFailure, or are
    tagged "untouched" when ``strict`` is False.
    """
    tol = tol or tolerances()
    Rr = R_rho(rho)
    eps = tol.angle
    sm = side_map(cells)
    out = []
    failures = []

    def fail(piece, why):
        if strict:
            failures.append(why)
        piece.kind = "untouched"
        out.append(piece)

    for c, cell in enumerate(cells):
        s = len(cell.vertices)
        if cell.radius < Rr:
            piece = RefinedCell(cell.coords.copy(), tuple(("p", i) for i in cell.vertices), "typeA", c, ())
            poles = cell.inward_poles()
            sides = [sdist(cell.coords[k], cell.coords[(k + 1) % s]) for k in range(s)]
            if s != 3:
                fail(piece, f"cell {c}: small circumradius but {s} sides")
            elif np.min(poles @ cell.center) <= math.sin(eps):
                fail(piece, f"cell {c}: small circumradius but circumcenter not interior")
            elif min(sides) < 2 * rho - eps:
                fail(piece, f"cell {c}: side shorter than 2 rho")
            else:
                out.append(piece)
            continue
        o = cell.center
        poles = cell.inward_poles()
        for k in range(s):
            if k == cell.separating_side:
                continue
            if float(poles[k] @ o) <= math.sin(eps):
                continue  # circumcenter on this side: the fan piece is empty
            i, j = cell.side(k)
            a, b = cell.coords[k], cell.coords[(k + 1) % s]
            base = sdist(a, b)
            nb = sm.get((j, i))
            inner = None
            if nb is not None:
                other = cells[nb[0]]
                if other.separating_side == nb[1]:
                    inner = nb[0]
            if inner is None:
                piece = RefinedCell(np.array([a, b, o]), (("p", i), ("p", j), ("o", c)), "typeB", c, (c,))
                legs = [cell.radius]
            else:
                o2 = cells[inner].center
                piece = RefinedCell(
                    np.array([a, o2, b, o]), (("p", i), ("o", inner), ("p", j), ("o", c)), "typeB", c, (c, inner)
                )
                legs = [cell.radius, cells[inner].radius]
            if base < 2 * rho - eps:
                fail(piece, f"cell {c} side {k}: base shorter than 2 rho")
            elif min(legs) < Rr - eps:
                fail(piece, f"cell {c} side {k}: leg shorter than R_rho")
            elif piece.area <= 0:
                fail(piece, f"cell {c} side {k}: non-positive area")
            else:
                out.append(piece)
    if failures:
        raise ClassificationFailure("; ".join(failures))
    return out


def cell_density(P: Region, rho: float) -> float:
    phi = P.phi
    if phi == 0.0:
        return 0.0
    return phi * (1 - math.cos(rho)) / P.area


def decompose(points, rho: float | None = None, strict: bool = True) -> Decomposition:
    P = as_point_system(points)
    cells = delaunay(P)
    D = Decomposition(P, cells, molnar(cells))
    if rho is not None:
        D.refined = refine(cells, rho, strict=strict)
        D.rho = rho
    return D
