"""Tilings of the sphere generated by great circles.

A tiling is built from a rotation system: every arc leaving a vertex is
ordered by its tangent angle, and faces are traced with the face on the left.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    GreatCircle,
    HALF_PI,
    SphericalCap,
    Tolerances,
    sdist,
    tolerances,
    unit,
)
from .errors import (
    BadParams,
    CoincidentCircles,
    FewerThanTwoCircles,
    OutOfDomain,
    UnknownName,
)
from .metrics import (
    InradiusResult,
    Lune,
    SphericalPolygon,
    circumradius_polygon,
    inradius_polygon,
    polygon_area,
)


class Edge(NamedTuple):
    u: int
    v: int
    circle: int
    mid: np.ndarray  # arc midpoint, distinguishes the two arcs between antipodes


@dataclass
class Cell:
    vertex_indices: tuple
    circle_indices: tuple  # side i runs from vertex i to vertex i+1 on this circle
    edge_indices: tuple
    shape: object  # SphericalPolygon or Lune
    point: np.ndarray  # a point in the open cell

    @property
    def sides(self) -> int:
        return len(self.vertex_indices)

    @property
    def is_lune(self) -> bool:
        return isinstance(self.shape, Lune)

    @property
    def area(self) -> float:
        return polygon_area(self.shape)


@dataclass
class Tiling:
    circles: list
    vertices: np.ndarray
    edges: list
    cells: list
    degeneracy_report: list = field(default_factory=list)

    @property
    def poles(self) -> np.ndarray:
        return np.array([c.vec for c in self.circles])

    def euler(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.cells)

    def sign_vector(self, cell: Cell) -> tuple:
        return tuple(int(s) for s in np.sign(self.poles @ cell.point))

    def is_simple(self) -> bool:
        return not self.degeneracy_report


def _frame(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.zeros(3)
    a[int(np.argmin(np.abs(v)))] = 1.0
    e1 = unit(a - np.dot(a, v) * v)
    return e1, np.cross(v, e1)


def _tangent(v: np.ndarray, toward: np.ndarray) -> np.ndarray:
    return unit(toward - np.dot(v, toward) * v)


def _validate_circles(circles, tol: Tolerances) -> list:
    circles = [c if isinstance(c, GreatCircle) else GreatCircle(tuple(c)) for c in circles]
    if len(circles) < 2:
        raise FewerThanTwoCircles("a tiling needs at least two great circles")
    for i, j in itertools.combinations(range(len(circles)), 2):
        if circles[i].same_as(circles[j], tol):
            raise CoincidentCircles(f"circles {i} and {j} coincide")
    return circles


def build_tiling(circles: Sequence, tol: Tolerances | None = None) -> Tiling:
    tol = tol or tolerances()
    circles = _validate_circles(circles, tol)
    P = np.array([c.vec for c in circles])
    n = len(circles)

    # vertices: pairwise intersections, merged within the merge radius
    raw = []
    for i, j in itertools.combinations(range(n), 2):
        x = unit(np.cross(P[i], P[j]))
        raw.append((x, {i, j}))
        raw.append((-x, {i, j}))
    verts: list[np.ndarray] = []
    inc: list[set] = []
    for x, cs in raw:
        for k, y in enumerate(verts):
            if sdist(x, y) <= tol.merge:
                inc[k] |= cs
                break
        else:
            verts.append(x)
            inc.append(set(cs))
    # canonical ordering
    order = sorted(range(len(verts)), key=lambda k: tuple(np.round(verts[k], 9)))
    V = np.array([verts[k] for k in order])
    inc = [inc[k] for k in order]

    degeneracy = [
        {"vertex": k, "circles": sorted(cs)} for k, cs in enumerate(inc) if len(cs) >= 3
    ]

    # arcs: split each circle at its vertices
    edges: list[Edge] = []
    for c in range(n):
        pole = P[c]
        e1, _ = _frame(pole)
        e2 = np.cross(pole, e1)
        on = [k for k in range(len(V)) if c in inc[k]]
        ang = sorted((math.atan2(float(V[k] @ e2), float(V[k] @ e1)) % (2 * math.pi), k) for k in on)
        for t in range(len(ang)):
            a0, k0 = ang[t]
            a1, k1 = ang[(t + 1) % len(ang)]
            if t + 1 == len(ang):
                a1 += 2 * math.pi
            am = 0.5 * (a0 + a1)
            mid = math.cos(am) * e1 + math.sin(am) * e2
            edges.append(Edge(k0, k1, c, mid))

    # rotation system: outgoing darts around each vertex, ccw seen from outside
    # dart 2e runs u->v, dart 2e+1 runs v->u
    around: list[list] = [[] for _ in range(len(V))]
    for e, ed in enumerate(edges):
        for d, (a, b) in ((2 * e, (ed.u, ed.v)), (2 * e + 1, (ed.v, ed.u))):
            va = V[a]
            f1, f2 = _frame(va)
            t = _tangent(va, ed.mid)
            around[a].append((math.atan2(float(t @ f2), float(t @ f1)), d))
    pos = {}
    for a in range(len(V)):
        around[a].sort()
        for idx, (_, d) in enumerate(around[a]):
            pos[d] = (a, idx)

    def origin(d):
        ed = edges[d // 2]
        return ed.u if d % 2 == 0 else ed.v

    def nxt(d):
        twin = d ^ 1
        a, idx = pos[twin]
        return around[a][(idx - 1) % len(around[a])][1]

    seen = set()
    cells = []
    for d0 in range(2 * len(edges)):
        if d0 in seen:
            continue
        face = []
        d = d0
        while d not in seen:
            seen.add(d)
            face.append(d)
            d = nxt(d)
        cells.append(_make_cell(face, V, edges, origin, tol))

    # canonical cell order: start at the smallest vertex, then sort
    def rot(c: Cell):
        k = int(np.argmin(c.vertex_indices))
        r = lambda t: tuple(t[k:]) + tuple(t[:k])
        return Cell(r(c.vertex_indices), r(c.circle_indices), r(c.edge_indices), c.shape, c.point)

    cells = sorted((rot(c) for c in cells), key=lambda c: (c.vertex_indices, c.edge_indices))
    return Tiling(circles, V, edges, cells, degeneracy)


def _make_cell(face, V, edges, origin, tol) -> Cell:
    vidx = tuple(origin(d) for d in face)
    cidx = tuple(edges[d // 2].circle for d in face)
    eidx = tuple(d // 2 for d in face)
    mids = np.array([edges[d // 2].mid for d in face])
    point = unit(V[list(vidx)].sum(axis=0) + mids.sum(axis=0))
    if len(face) == 2:
        v = V[vidx[0]]
        t_out = _tangent(v, mids[0])
        t_back = _tangent(v, mids[1])
        ang = math.atan2(float(v @ np.cross(t_out, t_back)), float(t_out @ t_back)) % (2 * math.pi)
        h = 0.5 * ang
        bis = math.cos(h) * t_out + math.sin(h) * np.cross(v, t_out)
        shape = Lune(tuple(v), ang, tuple(bis))
    else:
        shape = SphericalPolygon(V[list(vidx)], tol=tol)
    return Cell(vidx, cidx, eidx, shape, point)


# ---------------------------------------------------------------------------
# Cell metrics
# ---------------------------------------------------------------------------

@dataclass
class CellMetrics:
    inradius: list
    incenter: list
    circumradius: list
    circumcenter: list

    @property
    def min_inradius(self) -> float:
        return min(self.inradius)

    @property
    def max_circumradius(self) -> float:
        return max(self.circumradius)

    @property
    def argmin_inradius(self) -> int:
        return int(np.argmin(self.inradius))

    @property
    def argmax_circumradius(self) -> int:
        return int(np.argmax(self.circumradius))


def cell_metrics(T: Tiling, seed: int = 0) -> CellMetrics:
    ins, inc, circ, circc = [], [], [], []
    for cell in T.cells:
        r = inradius_polygon(cell.shape)
        ins.append(r.radius)
        inc.append(r.center)
        if cell.is_lune:
            circ.append(HALF_PI)
            circc.append(np.array(cell.shape.bisector))
        else:
            cap = circumradius_polygon(cell.shape, seed=seed)
            circ.append(cap.radius)
            circc.append(cap.vec)
    return CellMetrics(ins, inc, circ, circc)


# ---------------------------------------------------------------------------
# Named arrangements
# ---------------------------------------------------------------------------

GOLDEN = 0.5 * (1 + math.sqrt(5))


def _equatorial(m: int) -> list:
    return [(math.cos(k * math.pi / m), math.sin(k * math.pi / m), 0.0) for k in range(m)]


def _icosahedral_poles() -> list:
    g = GOLDEN
    pts = []
    for s1 in (1, -1):
        for s2 in (g, -g):
            pts += [(0, s1, s2), (s1, s2, 0), (s2, 0, s1)]
    pts = np.array(pts, dtype=float)
    poles = []
    for i, j in itertools.combinations(range(12), 2):
        if abs(np.linalg.norm(pts[i] - pts[j]) - 2.0) < 1e-9:
            m = unit(pts[i] + pts[j])
            if not any(abs(abs(m @ q) - 1) < 1e-9 for q in poles):
                poles.append(m)
    return [tuple(p) for p in poles]


_NAME_RE = re.compile(r"^\s*([a-z_]+[a-z])\s*(?:\(\s*(\d+)\s*\))?\s*$")


def parse_name(name: str, n: int | None = None) -> tuple[str, int | None]:
    m = _NAME_RE.match(name.lower()) if isinstance(name, str) else None
    if not m:
        # names such as "orthogonal3" end in a digit, accept them verbatim
        return name, n
    base, arg = m.group(1), m.group(2)
    return base, int(arg) if arg is not None else n


def named_arrangement(name: str, n: int | None = None) -> list:
    """Poles of one of the reference families, as GreatCircles."""
    fixed = {
        "orthogonal2": [(0, 0, 1), (1, 0, 0)],
        "orthogonal3": [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
        "optimal4": _equatorial(3) + [(0, 0, 1)],
        "tetrahedral6": [(1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1)],
        "cube_poles4": [(1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1)],
    }
    fixed["octahedral9"] = fixed["orthogonal3"] + fixed["tetrahedral6"]
    key = name.strip().lower() if isinstance(name, str) else name
    if key in fixed:
        poles = fixed[key]
    elif key == "icosahedral15":
        poles = _icosahedral_poles()
    else:
        base, arg = parse_name(key, n)
        if base not in ("prism", "pencil"):
            raise UnknownName(name)
        if arg is None:
            raise BadParams(f"{base} needs a circle count")
        if base == "prism":
            if arg < 3:
                raise BadParams("prism(n) needs n >= 3")
            poles = _equatorial(arg - 1) + [(0, 0, 1)]
        else:
            if arg < 2:
                raise BadParams("pencil(n) needs n >= 2")
            poles = _equatorial(arg)
    return [GreatCircle(tuple(p)) for p in poles]


ARRANGEMENT_NAMES = (
    "orthogonal2", "orthogonal3", "optimal4", "prism(n)", "tetrahedral6",
    "octahedral9", "icosahedral15", "cube_poles4", "pencil(n)",
)


# ---------------------------------------------------------------------------
# Arrangement-level bounds
# ---------------------------------------------------------------------------

class RgcBounds(NamedTuple):
    lower: float
    upper: float
    upper_clamped: bool


def rgc_upper_bound(n: int) -> float:
    """Upper bound on the largest possible minimum cell inradius for n > 4 circles."""
    if n <= 4:
        raise OutOfDomain("bound holds for n > 4")
    return math.acos(1.0 / (math.sqrt(2) * math.sin(n / (n - 1) * math.pi / 4)))


def prism_inradius(n: int) -> float:
    """Minimum cell inradius of the n-circle prism arrangement."""
    if n < 3:
        raise OutOfDomain("prism needs n >= 3")
    return math.atan(math.sin(math.pi / (2 * (n - 1))))


def Rgc_bounds(n: int) -> RgcBounds:
    """Lower and upper bounds on the least maximal cell circumradius for n circles."""
    if n <= 3:
        raise OutOfDomain("bounds hold for n > 3")
    lower = math.acos(1.0 / math.tan((1 + 2 / (n * n - n + 2)) * math.pi / 4))
    arg = 8 / (math.sqrt(3) * n ** (1 / 3))
    if arg >= 1.0:
        return RgcBounds(lower, HALF_PI, True)
    return RgcBounds(lower, math.asin(arg), False)


def covering_cell_lower_bound(R: float) -> float:
    if not 0.0 < R < HALF_PI:
        raise OutOfDomain("need 0 < R < pi/2")
    return 4 * math.pi / (8 * math.atan(1 / math.cos(R)) - 2 * math.pi)
