"""Inradius, circumradius, area and density formulas for spherical cells."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    HALF_PI,
    SphericalCap,
    Tolerances,
    clamp_unit,
    maximin,
    sdist,
    smallest_enclosing_cap,
    spherical,
    tolerances,
    triangle_metrics,
    unit,
    vertex_angle,
)
from .errors import (
    DegenerateTriangle,
    InvalidPolygon,
    InvalidSides,
    MixedRadii,
    NoCommonHemisphere,
    OutOfDomain,
    OverlappingCaps,
)


class SphericalPolygon:
    """Convex polygon, vertices counterclockwise as seen from outside the sphere."""

    __slots__ = ("vertices",)

    def __init__(self, vertices, tol: Tolerances | None = None, validate: bool = True):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        if V.ndim != 2 or V.shape[1] != 3 or len(V) < 3:
            raise InvalidPolygon("a polygon needs at least three vertices in R^3")
        V = V / np.linalg.norm(V, axis=1, keepdims=True)
        self.vertices = V
        if validate:
            self._validate(tol or tolerances())

    def _validate(self, tol: Tolerances):
        V = self.vertices
        s = len(V)
        for i in range(s):
            d = sdist(V[i], V[(i + 1) % s])
            if d < tol.angle or d > math.pi - tol.angle:
                raise InvalidPolygon("consecutive vertices coincide or are antipodal")
        value, _ = maximin(V)
        if value <= tol.angle:
            raise InvalidPolygon("polygon is not contained in an open hemisphere")
        N = self.inward_poles()
        if np.any(V @ N.T < -tol.angle):
            raise InvalidPolygon("polygon is not convex or not counterclockwise")
        for a in self.angles():
            if a >= math.pi - tol.angle:
                raise InvalidPolygon("interior angle is not below pi")

    def __len__(self):
        return len(self.vertices)

    def inward_poles(self) -> np.ndarray:
        V = self.vertices
        N = np.cross(V, np.roll(V, -1, axis=0))
        return N / np.linalg.norm(N, axis=1, keepdims=True)

    def angles(self) -> list[float]:
        V = self.vertices
        s = len(V)
        return [vertex_angle(V[i - 1], V[i], V[(i + 1) % s]) for i in range(s)]

    def sides(self) -> list[float]:
        V = self.vertices
        return [sdist(V[i], V[(i + 1) % len(V)]) for i in range(len(V))]

    def __repr__(self):
        return f"SphericalPolygon({len(self)} vertices)"


@dataclass(frozen=True)
class Lune:
    vertex: tuple
    angle: float
    bisector: tuple  # unit, orthogonal to vertex, at the middle of the lune

    def __post_init__(self):
        object.__setattr__(self, "vertex", tuple(float(x) for x in unit(self.vertex)))
        object.__setattr__(self, "bisector", tuple(float(x) for x in unit(self.bisector)))
        if not 0.0 < self.angle < math.pi:
            raise InvalidPolygon("lune angle must be in (0, pi)")
        if abs(float(np.dot(self.vertex, self.bisector))) > 1e-9:
            raise InvalidPolygon("lune bisector must be orthogonal to its vertex")

    def inward_poles(self) -> np.ndarray:
        v, m = np.array(self.vertex), np.array(self.bisector)
        w = np.cross(v, m)
        h = 0.5 * self.angle
        # sides are great half-circles through +-v at angle +-h from m
        return np.array([math.cos(h) * w + math.sin(h) * m, -math.cos(h) * w + math.sin(h) * m])

    @property
    def area(self) -> float:
        return 2.0 * self.angle


class InradiusResult(NamedTuple):
    radius: float
    center: np.ndarray
    mode: str  # "inscribed" or "lune"


def polygon_area(P) -> float:
    if isinstance(P, Lune):
        return P.area
    if not isinstance(P, SphericalPolygon):
        P = SphericalPolygon(P)
    return float(sum(P.angles()) - (len(P) - 2) * math.pi)


def inscribed_radius_triangle(A: float, B: float, C: float) -> float:
    """Radius of the circle inscribed in the triangle with side lengths A, B, C."""
    if min(A, B, C) <= 0 or A >= B + C or B >= A + C or C >= A + B or A + B + C >= 2 * math.pi:
        raise InvalidSides(f"sides {A}, {B}, {C} do not form a spherical triangle")
    P = 0.5 * (A + B + C)
    t = math.sin(P - A) * math.sin(P - B) * math.sin(P - C) / math.sin(P)
    return math.atan(math.sqrt(max(t, 0.0)))


def _inward_triangle_poles(a, b, c) -> np.ndarray:
    sgn = 1.0 if float(np.dot(a, np.cross(b, c))) > 0 else -1.0
    N = sgn * np.array([np.cross(b, c), np.cross(c, a), np.cross(a, b)])
    return N / np.linalg.norm(N, axis=1, keepdims=True)


def triangle_inradius(a, b, c, tol: Tolerances | None = None) -> InradiusResult:
    tol = tol or tolerances()
    pts = [np.asarray(x, dtype=float) for x in (a, b, c)]
    tm = triangle_metrics(*pts, tol=tol)
    order = sorted(range(3), key=lambda i: tm.sides[i])
    sa, sb, sc = (tm.sides[i] for i in order)
    if sb + sc - sa > math.pi + tol.angle:
        i = order[0]  # vertex opposite the shortest side carries the smallest angle
        A = pts[i]
        tb = pts[order[1]] - np.dot(A, pts[order[1]]) * A
        tc = pts[order[2]] - np.dot(A, pts[order[2]]) * A
        center = unit(unit(tb) + unit(tc))
        return InradiusResult(0.5 * tm.angles[i], center, "lune")
    radius = inscribed_radius_triangle(*tm.sides)
    N = _inward_triangle_poles(*pts)
    center = unit(np.linalg.solve(N, np.ones(3)))
    return InradiusResult(radius, center, "inscribed")


def inradius_polygon(P) -> InradiusResult:
    """Largest cap inside a convex polygon or lune, by the exact max-min program."""
    if isinstance(P, Lune):
        return InradiusResult(0.5 * P.angle, np.array(P.bisector), "lune")
    if not isinstance(P, SphericalPolygon):
        P = SphericalPolygon(P)
    value, x = maximin(P.inward_poles())
    if x is None or value <= 0:
        raise InvalidPolygon("polygon has empty interior")
    return InradiusResult(math.asin(clamp_unit(value)), x, "inscribed")


def circumradius_polygon(P, seed: int = 0) -> SphericalCap:
    """Smallest cap containing the polygon (equivalently its vertex set)."""
    if isinstance(P, Lune):
        raise InvalidPolygon("a lune is not contained in an open hemisphere")
    V = P.vertices if isinstance(P, SphericalPolygon) else np.atleast_2d(np.asarray(P, dtype=float))
    try:
        center, radius = smallest_enclosing_cap(V, seed=seed)
    except ValueError as exc:
        raise InvalidPolygon(str(exc)) from exc
    return SphericalCap(tuple(center), radius)


def dowker_area_circumscribed(r: float, k: float) -> float:
    """a_r(k): area of the regular k-gon circumscribed about a cap of radius r."""
    if not 0.0 < r < HALF_PI or k < 2:
        raise OutOfDomain("need 0 < r < pi/2 and k >= 2")
    return 2 * k * math.acos(clamp_unit(math.cos(r) * math.sin(math.pi / k))) - (k - 2) * math.pi


def dowker_area_inscribed(R: float, s: int) -> float:
    """A_R(s): area of the regular s-gon inscribed in a cap of radius R.

    Built from 2s congruent right triangles (center, vertex, edge midpoint).
    """
    if not 0.0 < R < HALF_PI or s < 2 or int(s) != s:
        raise OutOfDomain("need 0 < R < pi/2 and integer s >= 2")
    s = int(s)
    if s == 2:
        return 0.0
    O = np.array([0.0, 0.0, 1.0])
    V = spherical(R, 0.0)
    M = unit(V + spherical(R, 2 * math.pi / s))
    return 2 * s * triangle_metrics(O, V, M).area


def isosceles_angles(a: float, b: float) -> tuple[float, float]:
    """(base angle, apex angle) of the isosceles triangle with base a and legs b."""
    alpha = math.acos(clamp_unit(math.tan(a / 2) / math.tan(b)))
    beta = math.acos(clamp_unit((math.cos(a) - math.cos(b) ** 2) / math.sin(b) ** 2))
    return alpha, beta


def isosceles_density(a: float, b: float, rho: float) -> float:
    if rho < 0 or not (2 * rho <= a + 1e-12 and a < math.pi and a / 2 < b < HALF_PI):
        raise OutOfDomain("need 2 rho <= a < pi and a/2 < b < pi/2")
    alpha, beta = isosceles_angles(a, b)
    return 2 * alpha * (1 - math.cos(rho)) / (2 * alpha + beta - math.pi)


def lune_inradius_isosceles(phi: float) -> float:
    """Inradius of the isosceles triangle with sides pi/2, pi/2, phi."""
    if not 0.0 < phi < math.pi:
        raise OutOfDomain("need 0 < phi < pi")
    return math.atan(math.sin(phi / 2))


def lune_thickness_two_caps(C1: SphericalCap, C2: SphericalCap, tol: Tolerances | None = None) -> float:
    """Angle of the thinnest lune containing two congruent caps."""
    tol = tol or tolerances()
    rho = C1.radius
    if abs(C2.radius - rho) > tol.angle:
        raise MixedRadii("caps must be congruent")
    c1, c2 = C1.vec, C2.vec
    D = sdist(c1, c2)
    if D < 2 * rho - tol.angle:
        raise OverlappingCaps("caps overlap")
    ct = math.sin(rho) / math.cos(D / 2) if D < math.pi else math.inf
    if ct >= 1.0:
        raise NoCommonHemisphere("caps have no common supporting hemisphere")
    m = unit(c1 + c2)
    w = unit(c1 - c2)
    v = np.cross(m, w)
    st = math.sqrt(1.0 - ct * ct)
    n_plus = ct * m + st * v
    n_minus = ct * m - st * v
    return math.pi - sdist(n_plus, n_minus)

