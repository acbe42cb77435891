"""Geometric primitives on the unit sphere.

Points are plain numpy arrays of unit length (``d = 3`` unless stated).
Great circles are stored by a canonical unoriented pole, caps by center and
angular radius.  Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import contextlib
import contextvars
import itertools
import math
import random
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    CellNotInHemisphere,
    CoincidentCircles,
    DegeneratePoints,
    DegenerateTriangle,
    GeometryError,
)

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class Tolerances:
    unit: float = 1e-12
    angle: float = 1e-9
    area: float = 1e-9
    merge: float = 1e-8

    def __post_init__(self):
        for name in ("unit", "angle", "area", "merge"):
            value = getattr(self, name)
            if not 0.0 < value < 1e-3:
                raise ValueError(f"tolerance {name}={value!r} outside (0, 1e-3)")


_TOL = contextvars.ContextVar("tscaps_tolerances", default=Tolerances())


def tolerances() -> Tolerances:
    """Tolerances in effect for the current context."""
    return _TOL.get()


@contextlib.contextmanager
def override_tolerances(**changes):
    token = _TOL.set(replace(_TOL.get(), **{k: v for k, v in changes.items() if v is not None}))
    try:
        yield _TOL.get()
    finally:
        _TOL.reset(token)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise GeometryError("cannot normalize a zero or non-finite vector")
    return v / n


def check_unit(v, tol: Tolerances | None = None) -> np.ndarray:
    tol = tol or tolerances()
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > tol.unit * 1e3:
        raise GeometryError(f"vector {v} is not unit length")
    return v


def canonical_sign(v: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Flip ``v`` so that its first coordinate of magnitude > eps is positive."""
    for x in v:
        if abs(x) > eps:
            return v if x > 0 else -v
    return v


@dataclass(frozen=True)
class GreatCircle:
    """Great (sub)sphere given by an unoriented pole; ``pole`` is canonicalized."""

    pole: tuple

    def __post_init__(self):
        p = canonical_sign(unit(self.pole))
        object.__setattr__(self, "pole", tuple(float(x) for x in p))

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.pole)

    @property
    def dim(self) -> int:
        return len(self.pole)

    def same_as(self, other: "GreatCircle", tol: Tolerances | None = None) -> bool:
        tol = tol or tolerances()
        c = abs(float(np.dot(self.vec, other.vec)))
        return math.sqrt(max(0.0, 1.0 - c * c)) <= math.sin(tol.angle)


@dataclass(frozen=True)
class SphericalCap:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(x) for x in unit(self.center)))
        if not -1e-12 <= self.radius <= HALF_PI + 1e-9:
            raise GeometryError(f"cap radius {self.radius!r} outside [0, pi/2]")

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.center)

    def contains(self, p, slack: float | None = None) -> bool:
        slack = tolerances().angle if slack is None else slack
        return sdist(self.vec, p) <= self.radius + slack


def sdist(a, b) -> float:
    """Spherical distance in [0, pi]; stable near 0 and near pi."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 2.0 * math.atan2(float(np.linalg.norm(a - b)), float(np.linalg.norm(a + b)))


def sdist_many(a, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    return 2.0 * np.arctan2(np.linalg.norm(pts - a, axis=-1), np.linalg.norm(pts + a, axis=-1))


def clamp_unit(x: float) -> float:
    return max(-1.0, min(1.0, x))


def circle_distance(p, circle: GreatCircle) -> float:
    return math.asin(clamp_unit(abs(float(np.dot(p, circle.vec)))))


def intersect_circles(g1: GreatCircle, g2: GreatCircle, tol: Tolerances | None = None):
    tol = tol or tolerances()
    x = np.cross(g1.vec, g2.vec)
    n = np.linalg.norm(x)
    if n <= math.sin(tol.angle):
        raise CoincidentCircles("circles coincide within tolerance")
    x = x / n
    return x, -x


class TriangleMetrics(NamedTuple):
    sides: tuple  # side opposite each vertex
    angles: tuple
    area: float


def vertex_angle(prev, v, nxt) -> float:
    """Interior angle at ``v`` of a polygon traversed counterclockwise (seen from outside).

    Returns a value in (0, 2pi); values above pi are reflex vertices.
    """
    t_next = nxt - np.dot(v, nxt) * v
    t_prev = prev - np.dot(v, prev) * v
    ang = math.atan2(float(np.dot(v, np.cross(t_next, t_prev))), float(np.dot(t_next, t_prev)))
    return ang if ang > 0.0 else ang + 2.0 * math.pi


def _corner(a, b, c) -> float:
    det = abs(float(np.dot(a, np.cross(b, c))))
    return math.atan2(det, float(np.dot(b, c) - np.dot(a, b) * np.dot(a, c)))


def triangle_metrics(a, b, c, tol: Tolerances | None = None) -> TriangleMetrics:
    tol = tol or tolerances()
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    sa, sb, sc = sdist(b, c), sdist(a, c), sdist(a, b)
    for s in (sa, sb, sc):
        if s < tol.angle or s > math.pi - tol.angle:
            raise DegenerateTriangle("triangle has coincident or antipodal vertices")
    det = abs(float(np.dot(a, np.cross(b, c))))
    if det <= math.sin(tol.angle) * np.linalg.norm(np.cross(a, b)):
        raise DegenerateTriangle("vertices lie on a common great circle")
    angles = (_corner(a, b, c), _corner(b, c, a), _corner(c, a, b))
    # triple-product form; the angle excess cancels badly on slivers
    area = 2.0 * math.atan2(det, 1.0 + float(np.dot(a, b) + np.dot(b, c) + np.dot(c, a)))
    return TriangleMetrics((sa, sb, sc), angles, area)


def lhuilier_area(sa: float, sb: float, sc: float) -> float:
    s = 0.5 * (sa + sb + sc)
    t = math.tan(s / 2) * math.tan((s - sa) / 2) * math.tan((s - sb) / 2) * math.tan((s - sc) / 2)
    return 4.0 * math.atan(math.sqrt(max(t, 0.0)))


def circumcap(points, tol: Tolerances | None = None) -> SphericalCap:
    """Cap whose boundary passes through the given concyclic points."""
    tol = tol or tolerances()
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) < 3:
        raise DegeneratePoints("need at least three points")
    centered = P - P.mean(axis=0)
    _, s, vt = np.linalg.svd(centered)
    if s[1] <= math.sin(tol.angle):
        raise DegeneratePoints("points do not span a circle")
    if len(P) == 3:
        n = np.cross(P[1] - P[0], P[2] - P[0])
        n = n / np.linalg.norm(n)
    else:
        if s[2] > 1e-7:
            raise DegeneratePoints("points are not concyclic")
        n = vt[2]
    h = float(np.dot(n, P.mean(axis=0)))
    if abs(h) <= tol.unit:
        n = canonical_sign(n)
    elif h < 0:
        n = -n
    radius = float(np.mean([sdist(n, p) for p in P]))
    return SphericalCap(tuple(n), min(radius, HALF_PI))


# ---------------------------------------------------------------------------
# Max-min solver.  max over unit x of min_i <x, w_i> equals the distance from
# the origin to conv{w_i} (minimax duality), attained at x = p / |p| with p the
# nearest point.  The nearest point is the affine min-norm point of the vertex
# set of the face that carries it, so enumerating subsets of size <= d is exact.
# ---------------------------------------------------------------------------

_SUBSETS: dict = {}


def _subsets(m: int, k: int) -> np.ndarray:
    key = (m, k)
    if key not in _SUBSETS:
        _SUBSETS[key] = np.array(list(itertools.combinations(range(m), k)), dtype=np.intp).reshape(-1, k)
    return _SUBSETS[key]


def affine_min_norm(P: np.ndarray):
    """Batched min-norm point of the affine hull of each point set.

    ``P`` has shape (N, k, d).  Returns (points (N, d), weights (N, k), ok (N,)).
    """
    N, k, d = P.shape
    if k == 1:
        return P[:, 0, :].copy(), np.ones((N, 1)), np.ones(N, dtype=bool)
    M = np.zeros((N, k + 1, k + 1))
    M[:, :k, :k] = P @ np.swapaxes(P, 1, 2)
    M[:, :k, k] = 1.0
    M[:, k, :k] = 1.0
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-22
    lam = np.zeros((N, k))
    if ok.any():
        rhs = np.zeros((int(ok.sum()), k + 1, 1))
        rhs[:, k, 0] = 1.0
        lam[ok] = np.linalg.solve(M[ok], rhs)[:, :k, 0]
    pts = np.einsum("nk,nkd->nd", lam, P)
    return pts, lam, ok


def hull_candidates(W: np.ndarray, max_size: int | None = None):
    """Affine min-norm points of every subset of ``W`` that lie in conv(W)."""
    m, d = W.shape
    max_size = min(m, d if max_size is None else max_size)
    out = []
    for k in range(1, max_size + 1):
        idx = _subsets(m, k)
        pts, lam, ok = affine_min_norm(W[idx])
        good = ok & np.all(lam >= -1e-12, axis=1)
        out.append(pts[good])
    return np.concatenate(out, axis=0) if out else np.zeros((0, d))


def maximin(W) -> tuple[float, np.ndarray | None]:
    """Solve max over unit x of min_i <x, w_i>.

    Returns ``(value, x)``.  When the origin lies in conv(W) the value is 0 and
    ``x`` is None: no open hemisphere contains all the w_i.
    """
    W = np.atleast_2d(np.asarray(W, dtype=float))
    cand = hull_candidates(W)
    if len(cand) == 0:
        return 0.0, None
    norms = np.sqrt(np.einsum("nd,nd->n", cand, cand))
    keep = norms > 1e-15
    if not keep.any():
        return 0.0, None
    X = cand[keep] / norms[keep, None]
    # each normalized candidate is a feasible direction; the optimal one scores
    # exactly its norm, so the best score is the maximin value.  Scoring instead
    # of a KKT test keeps nearly coplanar inputs from being rejected.
    vals = np.min(W @ X.T, axis=0)
    best = int(np.argmax(vals))
    if vals[best] <= 0.0:
        return 0.0, None
    return float(vals[best]), X[best]


# ---------------------------------------------------------------------------
# Smallest enclosing cap (Welzl, any dimension)
# ---------------------------------------------------------------------------

def _cap_through(R: list, dim: int):
    if not R:
        return None
    U = np.array(R, dtype=float).reshape(-1, dim)
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    R0 = U[0]
    ok = True
    p = R0
    if len(U) > 1:
        # min-norm point of the affine hull, written on the differences.  For unit
        # vectors the radial part of q - R0 is exactly -|q - R0|^2 / 2; using that
        # instead of the rounded one keeps tiny caps accurate.
        E = U[1:] - R0
        rho = -0.5 * np.einsum("ij,ij->i", E, E)
        D = E - np.outer(E @ R0, R0) + np.outer(rho, R0)
        sv = np.linalg.svd(D, compute_uv=False)
        ok = sv[0] > 0.0 and sv[-1] > 1e-9 * sv[0]
        if ok:
            t = np.linalg.solve(D @ D.T, -rho)
            p = R0 + t @ D
    if not ok:
        # affinely dependent support set: fall back to the best proper subset
        best = None
        for k in range(len(R) - 1, 0, -1):
            for sub in itertools.combinations(R, k):
                cap = _cap_through(list(sub), dim)
                if cap is not None and all(sdist(cap[0], q) <= cap[1] + 1e-12 for q in R):
                    if best is None or cap[1] < best[1]:
                        best = cap
            if best is not None:
                return best
        return None
    n = np.linalg.norm(p)
    if n <= 1e-15:
        raise CellNotInHemisphere("support points are not contained in an open hemisphere")
    c = p / n
    # angular radius from the support points; acos(n) is useless for tiny caps
    return c, max(sdist(c, q) for q in R)


def _welzl(P: list, R: list, n: int, dim: int):
    if n == 0 or len(R) == dim:
        return _cap_through(R, dim)
    p = P[n - 1]
    cap = _welzl(P, R, n - 1, dim)
    if cap is not None and sdist(cap[0], p) <= cap[1] + 1e-13:
        return cap
    return _welzl(P, R + [p], n - 1, dim)


def smallest_enclosing_cap(points, seed: int = 0) -> tuple[np.ndarray, float]:
    """Minimal cap containing all points (Welzl's randomized incremental method).

    Returns ``(center, radius)``.  Requires the points to lie in an open
    hemisphere; raises :class:`CellNotInHemisphere` otherwise.
    """
    P = [np.asarray(p, dtype=float) for p in np.atleast_2d(np.asarray(points, dtype=float))]
    if not P:
        raise DegeneratePoints("no points")
    dim = len(P[0])
    order = list(range(len(P)))
    random.Random(seed).shuffle(order)
    P = [P[i] for i in order]
    center, _ = _welzl(P, [], len(P), dim)
    radius = max(sdist(center, q) for q in P)
    if radius >= HALF_PI - 1e-12:
        raise CellNotInHemisphere("enclosing cap is not smaller than a hemisphere")
    return center, radius


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic, nearly uniform point set on S^2."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = k * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def random_unit(rng: np.random.Generator, n: int, d: int = 3) -> np.ndarray:
    x = rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def spherical(theta: float, phi: float) -> np.ndarray:
    """Unit vector at polar angle ``theta`` and azimuth ``phi``."""
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def as_points(points: Sequence) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    return P / np.linalg.norm(P, axis=1, keepdims=True)
