"""Totally separable cap packings: verification, constructions and bounds.

A packing of congruent caps of radius rho is totally separable (TS) when
every pair of caps is split by a great circle that misses all cap interiors.
A great circle with pole u misses every cap iff |<u, c_k>| >= sin(rho) for all
centers c_k, so the admissible poles for a fixed sign pattern sigma form the
set {u : sigma_k <u, c_k> >= sin rho}.  It is non-empty iff the max-min value
of the signed centers reaches sin rho, and the maximizer is the normalized
min-norm point of a subset of at most three signed centers.  Enumerating those
subsets once gives every admissible sign pattern at the same time.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    GreatCircle,
    HALF_PI,
    SphericalCap,
    Tolerances,
    canonical_sign,
    fibonacci_sphere,
    hull_candidates,
    sdist,
    spherical,
    tolerances,
    unit,
)
from .molnar import R_rho
from .errors import (
    BadParams,
    CannotSaturate,
    Infeasible,
    MixedRadii,
    OutOfDomain,
    TooManyCaps,
    UnknownName,
)

MAX_SEARCH_CAPS = 14


@dataclass
class CapPacking:
    centers: np.ndarray  # (m, 3)
    radius: float

    def __post_init__(self):
        C = np.asarray(self.centers, dtype=float).reshape(-1, 3)
        if len(C):
            C = C / np.linalg.norm(C, axis=1, keepdims=True)
        self.centers = C
        if not 0.0 < self.radius <= HALF_PI + 1e-12:
            raise BadParams(f"cap radius {self.radius!r} outside (0, pi/2]")

    @classmethod
    def from_caps(cls, caps: Sequence[SphericalCap], tol: Tolerances | None = None) -> "CapPacking":
        tol = tol or tolerances()
        if not caps:
            raise BadParams("no caps given")
        r = caps[0].radius
        if any(abs(c.radius - r) > tol.angle for c in caps):
            raise MixedRadii("caps must all have the same radius")
        return cls(np.array([c.center for c in caps]), r)

    @property
    def m(self) -> int:
        return len(self.centers)

    @property
    def caps(self) -> list:
        return [SphericalCap(tuple(c), self.radius) for c in self.centers]

    def subset(self, idx) -> "CapPacking":
        return CapPacking(self.centers[list(idx)], self.radius)


@dataclass
class SeparationWitness:
    circles: list  # GreatCircle
    pairs: dict = field(default_factory=dict)  # (i, j) -> circle index, optional

    @property
    def poles(self) -> np.ndarray:
        return np.array([c.vec for c in self.circles]).reshape(-1, 3)


@dataclass
class PackingReport:
    is_packing: bool
    is_ts: bool | None
    density: float
    witness: SeparationWitness | None = None
    failures: list = field(default_factory=list)
    min_distance: float = math.pi


def density(P: CapPacking) -> float:
    return P.m * (1 - math.cos(P.radius)) / 2


def verify_packing(P: CapPacking, tol: Tolerances | None = None) -> PackingReport:
    tol = tol or tolerances()
    C = P.centers
    failures = []
    dmin = math.pi
    if P.m >= 2:
        G = np.clip(C @ C.T, -1.0, 1.0)
        iu = np.triu_indices(P.m, 1)
        # cheap screen by inner products, exact distances only for the close pairs
        close = G[iu] > math.cos(2 * P.radius) - 1e-6
        for i, j in zip(iu[0][close], iu[1][close]):
            d = sdist(C[i], C[j])
            if d < 2 * P.radius - tol.angle:
                failures.append((int(i), int(j)))
        dists = [sdist(C[i], C[j]) for i, j in zip(iu[0][close], iu[1][close])]
        if dists:
            dmin = min(dists)
        else:
            dmin = float(np.arccos(np.max(G[iu])))
    return PackingReport(not failures, None, density(P), None, failures, dmin)


# ---------------------------------------------------------------------------
# Separation search
# ---------------------------------------------------------------------------

def admissible_poles(centers: np.ndarray, radius: float, tol: Tolerances | None = None) -> np.ndarray:
    """All max-min poles of sign patterns that admit a cap-avoiding great circle.

    Every feasible sign pattern is represented by at least one returned pole.
    """
    tol = tol or tolerances()
    C = np.asarray(centers, dtype=float)
    W = np.vstack([C, -C])
    cand = hull_candidates(W, 3)
    nrm = np.linalg.norm(cand, axis=1)
    cand = cand[nrm > 1e-12] / nrm[nrm > 1e-12, None]
    s = math.sin(radius) - tol.angle
    ok = np.min(np.abs(cand @ C.T), axis=1) >= s
    U = cand[ok]
    if len(U) == 0:
        return U
    U = np.array([canonical_sign(u) for u in U])
    # drop duplicates
    keys = np.round(U, 10)
    _, first = np.unique(keys, axis=0, return_index=True)
    return U[np.sort(first)]


def _check_search_size(P: CapPacking, max_caps: int | None):
    limit = MAX_SEARCH_CAPS if max_caps is None else max_caps
    if P.m > limit:
        raise TooManyCaps(f"{P.m} caps exceed the search limit {limit}; supply a witness")


def find_separating_circle(P: CapPacking, i: int, j: int, max_caps: int | None = None,
                           tol: Tolerances | None = None) -> GreatCircle:
    """A great circle avoiding all caps that separates caps i and j (largest margin)."""
    _check_search_size(P, max_caps)
    U = admissible_poles(P.centers, P.radius, tol)
    if len(U):
        a = U @ P.centers[i]
        b = U @ P.centers[j]
        good = np.sign(a) != np.sign(b)
        if good.any():
            margin = np.min(np.abs(U[good] @ P.centers.T), axis=1)
            return GreatCircle(tuple(U[good][int(np.argmax(margin))]))
    raise Infeasible(f"no great circle separates caps {i} and {j}")


def sign_matrix(poles: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return np.where(poles @ centers.T >= 0, 1, -1).astype(np.int8)


def _separated_pairs(S: np.ndarray) -> np.ndarray:
    """m x m boolean: pair separated by at least one row of the sign matrix."""
    m = S.shape[1]
    out = np.zeros((m, m), dtype=bool)
    for row in S:
        out |= row[:, None] != row[None, :]
    return out


def _duplicate_column_pairs(S: np.ndarray) -> list:
    groups: dict = {}
    for k in range(S.shape[1]):
        groups.setdefault(S[:, k].tobytes(), []).append(k)
    fails = []
    for g in groups.values():
        fails += list(itertools.combinations(g, 2))
    return sorted(fails)


def pair_assignment(witness: SeparationWitness, centers: np.ndarray) -> dict:
    """First witness circle separating each pair."""
    S = sign_matrix(witness.poles, centers)
    out = {}
    m = S.shape[1]
    for i, j in itertools.combinations(range(m), 2):
        diff = np.nonzero(S[:, i] != S[:, j])[0]
        if len(diff):
            out[(i, j)] = int(diff[0])
    return out


def check_witness(P: CapPacking, witness: SeparationWitness, tol: Tolerances | None = None):
    """Returns (bad circle indices, failing pairs)."""
    tol = tol or tolerances()
    s = math.sin(P.radius) - tol.angle
    poles = witness.poles
    if len(poles) == 0:
        return [], list(itertools.combinations(range(P.m), 2))
    D = poles @ P.centers.T
    bad = [int(k) for k in np.nonzero(np.min(np.abs(D), axis=1) < s)[0]] if P.m else []
    good = [k for k in range(len(poles)) if k not in bad]
    S = sign_matrix(poles[good], P.centers) if good else np.ones((1, P.m), dtype=np.int8)
    fails = set(_duplicate_column_pairs(S))
    for (i, j), k in witness.pairs.items():
        k = int(k)
        if k in bad or not (D[k, i] * D[k, j] < 0):
            fails.add((min(i, j), max(i, j)))
    return bad, sorted(fails)


def verify_ts(P: CapPacking, witness: SeparationWitness | None = None, max_caps: int | None = None,
              tol: Tolerances | None = None) -> PackingReport:
    """Check total separability, by witness when given, else by exhaustive search.

    With a witness, ``is_ts`` means the witness certifies every pair.
    """
    tol = tol or tolerances()
    rep = verify_packing(P, tol)
    if not rep.is_packing:
        rep.is_ts = False
        return rep
    if witness is not None:
        bad, fails = check_witness(P, witness, tol)
        rep.witness = witness
        rep.failures = fails
        rep.is_ts = not fails and not bad
        return rep
    _check_search_size(P, max_caps)
    U = admissible_poles(P.centers, P.radius, tol)
    if len(U) == 0:
        rep.failures = list(itertools.combinations(range(P.m), 2))
        rep.is_ts = P.m < 2
        return rep
    S = sign_matrix(U, P.centers)
    sep = _separated_pairs(S)
    rep.failures = [(i, j) for i, j in itertools.combinations(range(P.m), 2) if not sep[i, j]]
    rep.is_ts = not rep.failures
    rep.witness = _greedy_witness(U, S, P.centers)
    return rep


def _greedy_witness(U: np.ndarray, S: np.ndarray, centers: np.ndarray) -> SeparationWitness:
    m = S.shape[1]
    iu = np.triu_indices(m, 1)
    splits = np.array([row[iu[0]] != row[iu[1]] for row in S])
    need = splits.any(axis=0)
    covered = np.zeros_like(need)
    chosen = []
    while (need & ~covered).any():
        gain = (splits & ~covered).sum(axis=1)
        k = int(np.argmax(gain))
        chosen.append(k)
        covered |= splits[k]
    circles = [GreatCircle(tuple(U[k])) for k in chosen]
    w = SeparationWitness(circles)
    w.pairs = pair_assignment(w, centers)
    return w


def separable_check_triples(P: CapPacking, R: float | None = None, tol: Tolerances | None = None,
                            only: Sequence[int] | None = None):
    """Every triple with pairwise center distances at most R (default 2 R_rho) is TS.

    Returns ``(ok, offending triple or None)``.  ``only`` restricts to triples
    containing one of the given indices.
    """
    tol = tol or tolerances()
    if R is None:
        R = 2 * R_rho(P.radius)
    C = P.centers
    close = (C @ C.T) >= math.cos(R) - 1e-12
    np.fill_diagonal(close, False)
    focus = set(range(P.m)) if only is None else set(only)
    for i, j, k in itertools.combinations(range(P.m), 3):
        if not (i in focus or j in focus or k in focus):
            continue
        if close[i, j] and close[i, k] and close[j, k]:
            sub = P.subset((i, j, k))
            if not verify_ts(sub, tol=tol).is_ts:
                return False, (i, j, k)
    return True, None


def is_separable_triples(P: CapPacking, R: float | None = None) -> bool:
    return separable_check_triples(P, R)[0]


# ---------------------------------------------------------------------------
# Bounds and known values
# ---------------------------------------------------------------------------

def delta_bound(rho: float) -> float:
    """Upper bound on the density of a TS-packing of caps of radius rho."""
    if not 0.0 < rho < math.pi / 4:
        raise OutOfDomain("need 0 < rho < pi/4")
    return (1 - math.cos(rho)) / (1 - math.pi / (4 * math.asin(1 / (math.sqrt(2) * math.cos(rho)))))


def rstam_upper(k: int) -> float:
    if k < 5:
        raise OutOfDomain("bound holds for k >= 5")
    return math.acos(1 / (math.sqrt(2) * math.sin(k / (k - 2) * math.pi / 4)))


_KNOWN = {
    2: HALF_PI,
    3: math.pi / 4,
    4: math.pi / 4,
    5: math.atan(0.75),
    6: math.atan(0.75),
    7: math.asin(1 / math.sqrt(3)),
    8: math.asin(1 / math.sqrt(3)),
}


def rstam_known(k: int):
    """Largest radius of k congruent TS caps where known, else None."""
    return _KNOWN.get(int(k))


def extremal_triangle(rho: float) -> np.ndarray:
    """Centers of the three quadrant caps that define delta(rho), around the pole e3."""
    R = R_rho(rho)
    return np.array([spherical(R, math.radians(a)) for a in (45.0, 135.0, 225.0)])


# ---------------------------------------------------------------------------
# Named constructions
# ---------------------------------------------------------------------------

def _coordinate_circles() -> list:
    return [GreatCircle((1.0, 0.0, 0.0)), GreatCircle((0.0, 1.0, 0.0)), GreatCircle((0.0, 0.0, 1.0))]


def _cube_vertices() -> np.ndarray:
    return np.array([[a, b, c] for a in (1, -1) for b in (1, -1) for c in (1, -1)], dtype=float) / math.sqrt(3)


def _cuboctahedral() -> tuple:
    tri = [spherical(math.pi / 4, 2 * math.pi * k / 3) for k in range(3)]
    circles = [GreatCircle(tuple(unit(np.cross(tri[a], tri[b])))) for a, b in ((0, 1), (1, 2), (2, 0))]
    # the six isosceles cells are the cells adjacent to the regular triangle
    # and its antipode; their incenters are the reflections of the regular
    # triangle's vertices through the opposite side lines
    from .arrangement import build_tiling, cell_metrics

    T = build_tiling(circles)
    M = cell_metrics(T)
    order = np.argsort(M.inradius)[::-1][:6]
    centers = np.array([M.incenter[i] for i in sorted(order)])
    return centers, circles


def named_packing(name: str):
    """(CapPacking, SeparationWitness or None) for a reference configuration."""
    key = name.strip().lower().replace(" ", "")
    if key == "octahedral8":
        return CapPacking(_cube_vertices(), math.asin(1 / math.sqrt(3))), SeparationWitness(_coordinate_circles())
    if key == "kissing8":
        return CapPacking(_cube_vertices(), math.pi / 6), SeparationWitness(_coordinate_circles())
    if key == "cuboctahedral6":
        centers, circles = _cuboctahedral()
        return CapPacking(centers, math.atan(0.75)), SeparationWitness(circles)
    if key in ("octa_sub(7)", "octa_sub7"):
        P, w = named_packing("octahedral8")
        return P.subset(range(7)), w
    if key in ("octa_sub(5)", "octa_sub5"):
        P, w = named_packing("cuboctahedral6")
        return P.subset(range(5)), w
    if key == "icosahedral12":
        g = 0.5 * (1 + math.sqrt(5))
        pts = []
        for s1 in (1, -1):
            for s2 in (g, -g):
                pts += [(0, s1, s2), (s1, s2, 0), (s2, 0, s1)]
        return CapPacking(np.array(pts, dtype=float), math.pi / 6), None
    raise UnknownName(name)


PACKING_NAMES = ("octahedral8", "cuboctahedral6", "octa_sub(5)", "octa_sub(7)", "kissing8", "icosahedral12")


def lune_grid(alpha: float, k: int):
    """2k^2 caps in the k x k grid of quadrangles cut from two orthogonal lunes of angle 2 alpha.

    Returns (CapPacking, SeparationWitness); the witness consists of the
    2(k+1) generating great circles.
    """
    if not 0.0 < alpha < HALF_PI or int(k) != k or k < 1:
        raise OutOfDomain("need 0 < alpha < pi/2 and integer k >= 1")
    k = int(k)
    rho = math.asin(math.sin(alpha / k) * math.cos(alpha))

    def h_pole(t):  # circle through +-e2 and (cos t, 0, sin t)
        return np.array([-math.sin(t), 0.0, math.cos(t)])

    def v_pole(t):  # circle through +-e3 and (cos t, -sin t, 0)
        return np.array([-math.sin(t), -math.cos(t), 0.0])

    thetas = [-alpha + 2 * alpha * i / k for i in range(k + 1)]
    mids = [-alpha + 2 * alpha * (i + 0.5) / k for i in range(k)]
    centers = []
    for th in mids:
        for tv in mids:
            x = unit(np.cross(h_pole(th), v_pole(tv)))
            if x[0] < 0:
                x = -x
            centers.append(x)
    centers = np.array(centers)
    centers = np.vstack([centers, -centers])
    circles = [GreatCircle(tuple(h_pole(t))) for t in thetas] + [GreatCircle(tuple(v_pole(t))) for t in thetas]
    return CapPacking(centers, rho), SeparationWitness(circles)


def saturate(P: CapPacking, seed: int = 0, spacing: float | None = None, check: bool = True) -> CapPacking:
    """Add antipodal pairs of caps until every grid point is within 2 R_rho of a center.

    The grid is a Fibonacci lattice whose spacing is at most R_rho / 4.  Each
    addition keeps the packing (2 R_rho)-separable or raises CannotSaturate.
    """
    rho = P.radius
    if not 0.0 < rho < math.pi / 4:
        raise OutOfDomain("saturation needs 0 < rho < pi/4")
    Rr = R_rho(rho)
    spacing = Rr / 4 if spacing is None else min(spacing, Rr / 4)
    n = int(math.ceil(4 * math.pi / spacing ** 2))
    grid = fibonacci_sphere(n)
    order = np.random.default_rng(seed).permutation(n)
    C = [c for c in P.centers]
    lim = math.cos(2 * Rr)
    for g in order:
        x = grid[g]
        if C and np.max(np.asarray(C) @ x) >= lim:
            continue
        C += [x, -x]
        if check:
            Q = CapPacking(np.array(C), rho)
            ok, triple = separable_check_triples(Q, 2 * Rr, only=(len(C) - 2, len(C) - 1))
            if not ok:
                raise CannotSaturate("adding a cap breaks (2 R_rho)-separability", triple)
    return CapPacking(np.array(C), rho)


def saturation_gap(P: CapPacking, n: int = 20000) -> float:
    """Largest distance from a Fibonacci sample point to the nearest center."""
    grid = fibonacci_sphere(n)
    return float(np.max(np.arccos(np.clip(np.max(grid @ P.centers.T, axis=1), -1, 1))))
